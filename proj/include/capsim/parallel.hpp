#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace capsim {

unsigned default_workers();

/// Splits [0, total) into fixed blocks and runs `work(begin, end)` on a worker
/// pool. Results come back in block order, so any reduction over them is
/// independent of the worker count.
template <class Result, class Work>
std::vector<Result> run_blocks(std::size_t total, std::size_t block_size, unsigned workers, Work work) {
    const std::size_t blocks = block_size == 0 ? 0 : (total + block_size - 1) / block_size;
    std::vector<Result> results(blocks);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto loop = [&] {
        for (;;) {
            const std::size_t b = next.fetch_add(1);
            if (b >= blocks) return;
            try {
                results[b] = work(b * block_size, std::min(total, (b + 1) * block_size));
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next.store(blocks);
            }
        }
    };
    workers = std::max(1U, std::min<unsigned>(workers == 0 ? default_workers() : workers, static_cast<unsigned>(std::max<std::size_t>(blocks, 1))));
    if (workers == 1) {
        loop();
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(loop);
        for (auto& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);
    return results;
}

}  // namespace capsim
