#include "curvehedge/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace curvehedge {

std::size_t resolve_threads(std::size_t requested) {
    if (requested > 0) return requested;
    return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

void parallel_blocks(std::size_t n, std::size_t threads,
                     const std::function<void(std::size_t, std::size_t, std::size_t)>& body,
                     std::size_t block) {
    const std::size_t blocks = block_count(n, block);
    const std::size_t workers = std::min(resolve_threads(threads), std::max<std::size_t>(blocks, 1));
    auto run_block = [&](std::size_t b) { body(b, b * block, std::min(n, (b + 1) * block)); };

    if (workers <= 1) {
        for (std::size_t b = 0; b < blocks; ++b) run_block(b);
        return;
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (;;) {
            const std::size_t b = next.fetch_add(1);
            if (b >= blocks) return;
            try {
                run_block(b);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next.store(blocks);
                return;
            }
        }
    };
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    pool.clear();
    if (failure) std::rethrow_exception(failure);
}

}  // namespace curvehedge
