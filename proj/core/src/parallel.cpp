#include "micromorph/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace micromorph {

namespace {

std::atomic<int> g_override{0};

int environment_workers()
{
    if (const char* env = std::getenv("MICROMORPH_THREADS")) {
        try {
            const int n = std::stoi(env);
            if (n >= 1) {
                return n;
            }
        } catch (const std::exception&) {
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace

int worker_count()
{
    const int o = g_override.load();
    return o > 0 ? o : environment_workers();
}

void set_worker_count(int n)
{
    g_override.store(std::max(0, n));
}

void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body)
{
    const auto workers = static_cast<std::size_t>(std::min<std::size_t>(static_cast<std::size_t>(worker_count()), n));
    if (workers <= 1) {
        body(0, n);
        return;
    }
    std::vector<std::exception_ptr> errors(workers);
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            const std::size_t begin = n * w / workers;
            const std::size_t end = n * (w + 1) / workers;
            pool.emplace_back([&, w, begin, end] {
                try {
                    body(begin, end);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
    }
    for (auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
}

}  // namespace micromorph
