#ifndef PHASEQ_DETAIL_PARALLEL_HPP
#define PHASEQ_DETAIL_PARALLEL_HPP

#include <atomic>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace phaseq::detail {

inline int resolve_workers(int n_workers) {
    if (n_workers > 0) return n_workers;
    unsigned hc = std::thread::hardware_concurrency();
    if (hc == 0) hc = 1;
    return static_cast<int>(hc > 8 ? 8 : hc);
}

/// Runs fn(chunk) for chunk = 0..n_chunks-1 on n_workers threads. Each chunk
/// must write only into its own output slot; results are then combined by the
/// caller in chunk order, so the outcome is independent of the worker count.
inline void run_chunks(std::size_t n_chunks, int n_workers,
                       const std::function<void(std::size_t)>& fn) {
    n_workers = resolve_workers(n_workers);
    if (n_workers <= 1 || n_chunks <= 1) {
        for (std::size_t c = 0; c < n_chunks; ++c) fn(c);
        return;
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            std::size_t c = next.fetch_add(1);
            if (c >= n_chunks) return;
            fn(c);
        }
    };
    std::vector<std::thread> pool;
    int nt = static_cast<int>(std::min<std::size_t>(n_workers, n_chunks));
    pool.reserve(nt);
    for (int t = 0; t < nt; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
}

} // namespace phaseq::detail

#endif
