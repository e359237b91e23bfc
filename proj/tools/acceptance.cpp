#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "bregman/harness/acceptance.hpp"

using namespace bregman::harness;

int main(int argc, char** argv) {
  CLI::App app{"Runs every acceptance criterion and prints one line per criterion"};
  std::string scale = "full";
  std::string out = "acceptance_out";
  std::uint64_t seed = 7;
  app.add_option("--scale", scale, "quick or full")->check(CLI::IsMember({"quick", "full"}));
  app.add_option("--out", out, "output directory");
  app.add_option("--seed", seed, "random seed");
  CLI11_PARSE(app, argc, argv);
  try {
    const auto rep = acceptance_suite(scale, seed, out, {}, [](const CheckEntry& e) {
      std::printf("[%s] %s  measured=%.6g bound=%.6g  (%.2fs)\n", e.status == Status::pass ? "PASS" : "FAIL",
                  e.name.c_str(), e.measured, e.bound, e.runtime_s);
      if (e.status != Status::pass) {
        for (const auto& d : e.detail) std::printf("         %s\n", d.c_str());
      }
      std::fflush(stdout);
    });
    std::size_t passed = 0;
    for (const auto& c : rep.checks) passed += c.status == Status::pass;
    std::printf("%zu/%zu criteria passed (%.2fs)\n", passed, rep.checks.size(), rep.runtime_s);
    return rep.exit_code();
  } catch (const std::exception& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return kInternalError;
  }
}
