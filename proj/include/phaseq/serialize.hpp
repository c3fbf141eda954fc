#ifndef PHASEQ_SERIALIZE_HPP
#define PHASEQ_SERIALIZE_HPP

#include <json.hpp>

#include "phaseq/coherent.hpp"
#include "phaseq/fock.hpp"
#include "phaseq/pathint.hpp"

namespace phaseq {

// Operators and vectors use {dim, hbar, entries: [[re, im], ...]} row-major.

inline nlohmann::json to_json(const FockOperator& op) {
    nlohmann::json entries = nlohmann::json::array();
    for (int i = 0; i < op.dim; ++i)
        for (int j = 0; j < op.dim; ++j)
            entries.push_back({op.entries(i, j).real(), op.entries(i, j).imag()});
    return {{"dim", op.dim}, {"hbar", op.hbar}, {"entries", entries}};
}

inline FockOperator fock_operator_from_json(const nlohmann::json& j) {
    const int dim = j.at("dim").get<int>();
    const double hbar = j.at("hbar").get<double>();
    const auto& entries = j.at("entries");
    if (entries.size() != static_cast<std::size_t>(dim) * dim)
        throw ContractError("FockOperator json: entries length != dim^2");
    Matrix m(dim, dim);
    std::size_t k = 0;
    for (int i = 0; i < dim; ++i)
        for (int jj = 0; jj < dim; ++jj, ++k)
            m(i, jj) = Complex(entries[k][0].get<double>(), entries[k][1].get<double>());
    return {std::move(m), hbar};
}

inline nlohmann::json to_json(const StateVector& v, double hbar = 1.0) {
    nlohmann::json entries = nlohmann::json::array();
    for (int i = 0; i < v.dim; ++i)
        entries.push_back({v.entries(i).real(), v.entries(i).imag()});
    return {{"dim", v.dim}, {"hbar", hbar}, {"entries", entries}};
}

inline StateVector state_vector_from_json(const nlohmann::json& j) {
    const int dim = j.at("dim").get<int>();
    const auto& entries = j.at("entries");
    if (entries.size() != static_cast<std::size_t>(dim))
        throw ContractError("StateVector json: entries length != dim");
    Vector v(dim);
    for (int i = 0; i < dim; ++i)
        v(i) = Complex(entries[i][0].get<double>(), entries[i][1].get<double>());
    return StateVector(std::move(v));
}

inline nlohmann::json to_json(const MetricReport& r) {
    return {{"gpp", r.gpp},
            {"gpq", r.gpq},
            {"gqq", r.gqq},
            {"theta_p", r.theta_p},
            {"theta_q", r.theta_q},
            {"mean_q", r.mean_q},
            {"mean_p", r.mean_p},
            {"var_q", r.var_q},
            {"var_p", r.var_p},
            {"cov_sym", r.cov_sym},
            {"physical_ratio", r.physical_ratio}};
}

inline nlohmann::json to_json(const MCEstimate& e) {
    return {{"re", e.value.real()},       {"im", e.value.imag()},
            {"std_err_re", e.std_err_re}, {"std_err_im", e.std_err_im},
            {"n_samples", e.n_samples},   {"seed", e.seed},
            {"low_precision", e.low_precision}};
}

} // namespace phaseq

#endif
