#include <chrono>
#include <cstdlib>
#include <cstring>
#include <iostream>
#include <set>

#include "criteria.hpp"

int main(int argc, char** argv) {
  std::set<int> only;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) {
      only.insert(std::atoi(argv[++i]));
    } else {
      std::cerr << "usage: treehash_acceptance [--only N]...\n";
      return 2;
    }
  }

  bool all = true;
  for (const auto& c : acceptance::criteria()) {
    if (!only.empty() && !only.count(c.id)) continue;
    auto t0 = std::chrono::steady_clock::now();
    acceptance::Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cout << (o.pass ? "PASS" : "FAIL") << "  criterion " << c.id << ": " << c.title << " [" << o.detail
              << "] (" << secs << " s)\n";
    all = all && o.pass;
  }
  return all ? 0 : 1;
}
