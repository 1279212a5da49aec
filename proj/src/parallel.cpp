#include "ballgap/parallel.hpp"

#include <atomic>
#include <algorithm>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace ballgap {

namespace {
int g_max_threads = 0;  // 0 = hardware default
thread_local bool t_in_parallel = false;
}

void set_max_threads(int n) { g_max_threads = n; }

int max_threads() {
    if (g_max_threads > 0) return g_max_threads;
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallel_blocks(size_t total, size_t block_size,
                     const std::function<void(size_t, size_t, size_t)>& fn) {
    if (total == 0) return;
    if (block_size == 0) block_size = 1;
    size_t n_blocks = (total + block_size - 1) / block_size;
    size_t workers = std::min<size_t>(static_cast<size_t>(max_threads()), n_blocks);

    auto run_block = [&](size_t b) {
        size_t begin = b * block_size;
        size_t end = std::min(begin + block_size, total);
        fn(b, begin, end);
    };

    // nested regions run inline: the block decomposition (and therefore the
    // result) is the same either way
    if (workers <= 1 || t_in_parallel) {
        for (size_t b = 0; b < n_blocks; ++b) run_block(b);
        return;
    }

    std::atomic<size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            t_in_parallel = true;
            for (;;) {
                size_t b = next.fetch_add(1);
                if (b >= n_blocks) return;
                try {
                    run_block(b);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace ballgap
