#include "perc/parallel.hpp"

#include <algorithm>
#include <stdexcept>
#include <thread>
#include <vector>

namespace perc {

int hardware_workers() {
    const unsigned n = std::thread::hardware_concurrency();
    return n == 0 ? 1 : static_cast<int>(n);
}

void run_sharded(std::int64_t total, int workers, const std::function<void(int, std::int64_t, std::int64_t)>& fn) {
    if (workers < 1) throw std::invalid_argument("worker count must be >= 1");
    workers = static_cast<int>(std::min<std::int64_t>(workers, std::max<std::int64_t>(total, 1)));
    if (workers == 1) {
        fn(0, 0, total);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
    for (int s = 0; s < workers; ++s) {
        const std::int64_t begin = total * s / workers;
        const std::int64_t end = total * (s + 1) / workers;
        pool.emplace_back([&, s, begin, end] {
            try {
                fn(s, begin, end);
            } catch (...) {
                errors[static_cast<std::size_t>(s)] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

}  // namespace perc
