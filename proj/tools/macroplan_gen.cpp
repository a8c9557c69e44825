// macroplan-gen: writes random ferry or gripper instances for benchmarking.

#include <filesystem>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "macroplan/generators.hpp"
#include "macroplan/strips.hpp"

namespace fs = std::filesystem;

int main(int argc, char** argv) {
  CLI::App app{"Generate ferry or gripper problem sets"};
  std::string family = "ferry";
  std::size_t count = 10, size_a = 3, size_b = 3;
  std::uint64_t seed = 1;
  std::string out = "problems";
  app.add_option("family", family, "ferry or gripper")->check(CLI::IsMember({"ferry", "gripper"}));
  app.add_option("--count", count, "Number of problems")->capture_default_str();
  app.add_option("--locations,--rooms", size_a, "Locations (ferry) or rooms (gripper)")->capture_default_str();
  app.add_option("--cars,--balls", size_b, "Cars (ferry) or balls (gripper)")->capture_default_str();
  app.add_option("--seed", seed, "First seed; problem i uses seed + i")->capture_default_str();
  app.add_option("--out", out, "Output directory")->capture_default_str();
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 3;
  }
  if (size_a == 0 || size_b == 0) {
    std::cerr << "sizes must be positive\n";
    return 3;
  }
  fs::create_directories(out);
  for (std::size_t i = 0; i < count; ++i) {
    auto t = family == "ferry" ? macroplan::gen::ferry(size_a, size_b, seed + i)
                               : macroplan::gen::gripper(size_a, size_b, seed + i);
    if (i == 0) macroplan::write_text_file((fs::path(out) / "domain.pddl").string(), t.domain);
    macroplan::write_text_file((fs::path(out) / (t.name + ".pddl")).string(), t.problem);
  }
  std::cout << "wrote " << count << " " << family << " problems to " << out << "\n";
  return 0;
}
