#include "rayforge/parallel.hpp"

namespace rayforge {

namespace {
std::atomic<int> g_threads{1};
}

int default_threads() { return g_threads.load(); }
void set_default_threads(int n) { g_threads.store(n > 0 ? n : 1); }

}  // namespace rayforge
