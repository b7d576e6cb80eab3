#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace tropical::cli {

// Exit codes.
constexpr int kOk = 0;
constexpr int kError = 1;
constexpr int kNoSolution = 2;

struct Config {
  std::string model = "tyson";  // path or the builtin name "tyson"
  std::string profile;          // Tyson constants; empty selects the shipped default
  std::optional<double> eps;
  double tol = 1e-8;
  std::optional<double> t_end;
  std::string out = ".";
  std::uint64_t seed = 1;

  // equilibrate / reduce
  bool conservation = false;
  std::vector<std::size_t> subset;
  bool exclusive = false;
  bool no_permanency = false;
  std::size_t solution = 0;

  // tropicalize / simulate / compare
  std::string kind = "full";
  std::string method = "auto";
  std::string wall = "equilibrate";
  std::vector<double> x0;
  std::string kind_a = "full";
  std::string kind_b = "complete";
  std::vector<double> eps_list{0.3, 0.2, 0.1};
};

int cmd_equilibrate(const Config& cfg);
int cmd_tropicalize(const Config& cfg);
int cmd_simulate(const Config& cfg);
int cmd_reduce(const Config& cfg);
int cmd_compare(const Config& cfg);
int cmd_tyson_demo(const Config& cfg);

}  // namespace tropical::cli
