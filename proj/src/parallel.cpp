#include "nlvis/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <string>
#include <thread>

namespace nlvis {

unsigned worker_count() {
    if (const char* env = std::getenv("NLVIS_WORKERS")) {
        try {
            int v = std::stoi(env);
            if (v >= 1) return static_cast<unsigned>(v);
        } catch (...) {
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_blocks(std::size_t n, std::size_t block_size,
                     const std::function<void(std::size_t, std::size_t, std::size_t)>& fn) {
    if (n == 0) return;
    block_size = std::max<std::size_t>(1, block_size);
    const std::size_t blocks = (n + block_size - 1) / block_size;
    const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(worker_count(), blocks));

    auto run_block = [&](std::size_t b) {
        std::size_t begin = b * block_size;
        fn(b, begin, std::min(n, begin + block_size));
    };
    if (workers <= 1) {
        for (std::size_t b = 0; b < blocks; ++b) run_block(b);
        return;
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::atomic<bool> failed{false};
    auto worker = [&] {
        for (;;) {
            std::size_t b = next.fetch_add(1);
            if (b >= blocks || failed.load()) return;
            try {
                run_block(b);
            } catch (...) {
                if (!failed.exchange(true)) error = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

double blocked_sum(std::size_t n, std::size_t block_size,
                   const std::function<double(std::size_t, std::size_t)>& fn) {
    block_size = std::max<std::size_t>(1, block_size);
    const std::size_t blocks = (n + block_size - 1) / block_size;
    std::vector<double> partial(blocks, 0.0);
    parallel_blocks(n, block_size, [&](std::size_t b, std::size_t begin, std::size_t end) {
        partial[b] = fn(begin, end);
    });
    double total = 0.0;
    for (double v : partial) total += v;
    return total;
}

}  // namespace nlvis
