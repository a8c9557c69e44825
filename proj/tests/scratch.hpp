#pragma once

#include <atomic>
#include <filesystem>
#include <random>
#include <string>

#include "macroplan/generators.hpp"
#include "macroplan/strips.hpp"

// Scratch directory removed on destruction.
class ScratchDir {
 public:
  explicit ScratchDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("macroplan-" + tag + "-" + std::to_string(rd()) + "-" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~ScratchDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  ScratchDir(const ScratchDir&) = delete;
  ScratchDir& operator=(const ScratchDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::string operator/(const std::string& rel) const { return (path_ / rel).string(); }

 private:
  std::filesystem::path path_;
};

// Writes domain.pddl plus one file per problem under `dir/sub`.
inline void write_ferry_set(const std::filesystem::path& dir, const std::string& sub, std::size_t locations,
                            std::size_t cars, std::uint64_t first_seed, std::size_t count) {
  std::filesystem::create_directories(dir / sub);
  macroplan::write_text_file((dir / "domain.pddl").string(), macroplan::gen::kFerryDomain);
  for (std::size_t i = 0; i < count; ++i) {
    auto g = macroplan::gen::ferry(locations, cars, first_seed + i);
    macroplan::write_text_file((dir / sub / (g.name + ".pddl")).string(), g.problem);
  }
}
