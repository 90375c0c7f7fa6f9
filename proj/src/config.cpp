#include "gctl/config.hpp"

#include "gctl/types.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <sstream>

namespace gctl {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double to_double(const std::string& v) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) throw DomainError("not a number: '" + v + "'");
  return out;
}

template <class Int>
Int to_int(const std::string& v) {
  Int out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size())
    throw DomainError("not an integer: '" + v + "'");
  return out;
}

template <class T, class Conv>
std::vector<T> to_list(const std::string& v, Conv conv) {
  std::vector<T> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(conv(trim(item)));
  if (out.empty()) throw DomainError("empty list");
  return out;
}

using Setter = std::function<void(ExperimentConfig&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"problem.id", [](auto& c, const auto& v) { c.problem_id = v; }},
      {"problem.sigma_low", [](auto& c, const auto& v) { c.sigma_low = to_double(v); }},
      {"problem.sigma_high", [](auto& c, const auto& v) { c.sigma_high = to_double(v); }},
      {"problem.T", [](auto& c, const auto& v) { c.horizon = to_double(v); }},
      {"problem.beta", [](auto& c, const auto& v) { c.beta = to_double(v); }},
      {"problem.strike", [](auto& c, const auto& v) { c.strike = to_double(v); }},
      {"problem.eta", [](auto& c, const auto& v) { c.eta = to_double(v); }},
      {"problem.controls", [](auto& c, const auto& v) { c.controls = to_list<double>(v, to_double); }},
      {"problem.x0", [](auto& c, const auto& v) { c.x0 = to_double(v); }},
      {"problem.terminal", [](auto& c, const auto& v) { c.terminal = v; }},
      {"grid.x_min", [](auto& c, const auto& v) { c.x_min = to_double(v); }},
      {"grid.x_max", [](auto& c, const auto& v) { c.x_max = to_double(v); }},
      {"grid.nx", [](auto& c, const auto& v) { c.nx = to_int<int>(v); }},
      {"grid.nt", [](auto& c, const auto& v) { c.nt = to_int<int>(v); }},
      {"grid.cfl_factor", [](auto& c, const auto& v) { c.cfl_factor = to_double(v); }},
      {"mc.n_paths", [](auto& c, const auto& v) { c.n_paths = to_int<std::size_t>(v); }},
      {"mc.levels", [](auto& c, const auto& v) { c.levels = to_int<int>(v); }},
      {"mc.nt", [](auto& c, const auto& v) { c.mc_nt = to_int<std::size_t>(v); }},
      {"mc.n_basis", [](auto& c, const auto& v) { c.n_basis = to_int<int>(v); }},
      {"mc.seed", [](auto& c, const auto& v) { c.seed = to_int<std::uint64_t>(v); }},
      {"tree.steps", [](auto& c, const auto& v) { c.tree_steps = to_int<int>(v); }},
      {"check.tolerance", [](auto& c, const auto& v) { c.tolerance = to_double(v); }},
      {"check.tree_tolerance", [](auto& c, const auto& v) { c.tree_tolerance = to_double(v); }},
      {"check.dpp_t", [](auto& c, const auto& v) { c.dpp_t = to_double(v); }},
      {"check.dpp_windows",
       [](auto& c, const auto& v) { c.dpp_windows = to_list<double>(v, to_double); }},
      {"check.dpp_decay", [](auto& c, const auto& v) { c.dpp_decay = to_double(v); }},
      {"check.deltas", [](auto& c, const auto& v) { c.deltas = to_list<double>(v, to_double); }},
      {"check.f0_slope", [](auto& c, const auto& v) { c.f0_slope = to_double(v); }},
      {"check.nx_list", [](auto& c, const auto& v) { c.nx_list = to_list<int>(v, to_int<int>); }},
      {"check.padding", [](auto& c, const auto& v) { c.padding = to_double(v); }},
      {"output.dir", [](auto& c, const auto& v) { c.output_dir = v; }},
      {"output.threads", [](auto& c, const auto& v) { c.threads = to_int<int>(v); }},
  };
  return table;
}

}  // namespace

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig cfg;
  std::string section;
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    auto fail = [&](const std::string& why) {
      throw DomainError("config line " + std::to_string(lineno) + ": " + why);
    };
    if (line.front() == '[') {
      if (line.back() != ']') fail("unterminated section header");
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail("expected 'key = value'");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    const std::string full = section.empty() ? key : section + "." + key;
    const auto it = setters().find(full);
    if (it == setters().end()) fail("unknown key '" + full + "'");
    try {
      it->second(cfg, value);
    } catch (const DomainError& e) {
      fail(std::string(e.what()) + " for key '" + full + "'");
    }
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open config '" + path.string() + "'");
  return parse_config(in);
}

}  // namespace gctl
