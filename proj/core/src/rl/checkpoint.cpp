#include "croprl/rl/checkpoint.hpp"

#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "croprl/episode_log.hpp"
#include "croprl/error.hpp"

namespace croprl::rl {
namespace {

constexpr const char* kMagic = "croprl-checkpoint";
constexpr int kVersion = 1;

class Reader {
 public:
  Reader(std::istream& in, std::string source) : in_(in), source_(std::move(source)) {}

  std::string word() {
    std::string w;
    if (!(in_ >> w)) fail("unexpected end of file");
    return w;
  }

  void expect(const std::string& keyword) {
    const auto w = word();
    if (w != keyword) fail(fmt::format("expected '{}', found '{}'", keyword, w));
  }

  double real() {
    const auto w = word();
    char* end = nullptr;
    const double v = std::strtod(w.c_str(), &end);
    if (end != w.c_str() + w.size()) fail(fmt::format("bad number '{}'", w));
    return v;
  }

  long long integer() {
    const auto w = word();
    char* end = nullptr;
    const long long v = std::strtoll(w.c_str(), &end, 10);
    if (end != w.c_str() + w.size()) fail(fmt::format("bad integer '{}'", w));
    return v;
  }

  [[noreturn]] void fail(const std::string& why) const {
    throw DataError(fmt::format("{}: corrupt checkpoint: {}", source_, why));
  }

 private:
  std::istream& in_;
  std::string source_;
};

void write_vector(std::ostream& out, const char* name, const Eigen::VectorXd& v) {
  fmt::print(out, "{} {}\n", name, v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    fmt::print(out, "{:a}{}", v[i], (i + 1) % 8 == 0 || i + 1 == v.size() ? "\n" : " ");
  }
}

Eigen::VectorXd read_vector(Reader& r, const char* name, Eigen::Index expected) {
  r.expect(name);
  const auto n = r.integer();
  if (n != expected) r.fail(fmt::format("'{}' has {} entries, expected {}", name, n, expected));
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = r.real();
  return v;
}

}  // namespace

void write_checkpoint(std::ostream& out, const Agent& agent) {
  const PolicyLayout& l = agent.network.layout();
  fmt::print(out, "{} {}\n", kMagic, kVersion);
  fmt::print(out, "input {}\nhidden {}\n", l.input, l.hidden);
  fmt::print(out, "action_scale {:a}\naction_offset {:a}\n", agent.action_scale,
             agent.action_offset);
  write_vector(out, "parameters", agent.network.parameters());
  fmt::print(out, "normalizer_count {:a}\n", agent.normalizer.count());
  write_vector(out, "normalizer_mean", agent.normalizer.mean());
  write_vector(out, "normalizer_variance", agent.normalizer.variance());
  fmt::print(out, "end\n");
}

Agent read_checkpoint(std::istream& in, const std::string& source) {
  Reader r(in, source);
  r.expect(kMagic);
  if (const auto version = r.integer(); version != kVersion) {
    r.fail(fmt::format("unsupported version {}", version));
  }
  PolicyLayout layout;
  r.expect("input");
  layout.input = static_cast<int>(r.integer());
  r.expect("hidden");
  layout.hidden = static_cast<int>(r.integer());
  if (layout.input < 1 || layout.hidden < 1) r.fail("non-positive layout");

  Agent agent;
  r.expect("action_scale");
  agent.action_scale = r.real();
  r.expect("action_offset");
  agent.action_offset = r.real();

  agent.network = PolicyNetwork(layout);
  agent.network.parameters() = read_vector(r, "parameters", layout.size());
  if (!agent.network.parameters().allFinite()) r.fail("non-finite parameters");

  r.expect("normalizer_count");
  const double count = r.real();
  auto mean = read_vector(r, "normalizer_mean", layout.input);
  auto var = read_vector(r, "normalizer_variance", layout.input);
  agent.normalizer = RunningNormalizer(layout.input);
  agent.normalizer.set_state(count, std::move(mean), std::move(var));
  r.expect("end");
  return agent;
}

void save_checkpoint(const std::filesystem::path& path, const Agent& agent) {
  write_file_atomically(path, [&](std::ostream& out) { write_checkpoint(out, agent); });
}

Agent load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError(fmt::format("cannot open checkpoint '{}'", path.string()));
  return read_checkpoint(in, path.string());
}

}  // namespace croprl::rl
