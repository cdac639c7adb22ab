#include "condens/parallel.hpp"

#include <atomic>

namespace condens {

namespace {
std::atomic<unsigned> g_threads{0};
}

void set_thread_count(unsigned count)
{
    g_threads.store(count);
}

unsigned thread_count()
{
    const unsigned n = g_threads.load();
    if (n > 0)
        return n;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

} // namespace condens
