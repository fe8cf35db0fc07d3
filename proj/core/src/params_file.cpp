#include "treehash/params_file.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "treehash/error.hpp"

namespace treehash {

namespace {

std::string_view trim(std::string_view s) {
  const char* ws = " \t\r\n";
  auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

std::uint64_t to_u64(std::string_view key, std::string_view v) {
  std::uint64_t x = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc{} || ptr != v.data() + v.size()) {
    throw ConfigError("parameter " + std::string(key) + ": '" + std::string(v) + "' is not a non-negative integer");
  }
  return x;
}

}  // namespace

void set_param(ModeParams& p, std::string_view key, std::string_view value) {
  value = trim(value);
  if (key == "mode") {
    p.mode = parse_mode(value);
  } else if (key == "epsilon") {
    p.epsilon = Rational::parse(value);
  } else if (key == "c") {
    p.c = to_u64(key, value);
  } else if (key == "q") {
    p.q = to_u64(key, value);
  } else if (key == "B") {
    p.B = to_u64(key, value);
  } else if (key == "h") {
    p.h = to_u64(key, value);
  } else if (key == "k") {
    p.k = to_u64(key, value);
  } else if (key == "d") {
    p.d = to_u64(key, value);
  } else if (key == "nI") {
    p.group_size = to_u64(key, value);
  } else if (key == "I") {
    p.interleave_bits = to_u64(key, value);
  } else {
    throw ConfigError("unknown parameter '" + std::string(key) + "'");
  }
}

ModeParams parse_params(std::string_view text, ModeParams base) {
  std::size_t line_no = 0;
  while (!text.empty()) {
    auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    }
    set_param(base, trim(line.substr(0, eq)), line.substr(eq + 1));
  }
  return base;
}

ModeParams load_params_file(const std::string& path, ModeParams base) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot open parameter file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_params(ss.str(), std::move(base));
}

std::string params_to_text(const ModeParams& p) {
  std::ostringstream os;
  os << "mode = " << mode_name(p.mode) << "\n";
  switch (p.mode) {
    case Mode::M1:
      os << "B = " << p.B << "\n";
      break;
    case Mode::M2S:
    case Mode::M2L:
      os << "q = " << p.q << "\n";
      break;
    case Mode::M4S:
    case Mode::M5S:
      os << "epsilon = " << p.epsilon.to_string() << "\n";
      break;
    case Mode::M5L:
      os << "epsilon = " << p.epsilon.to_string() << "\n";
      [[fallthrough]];
    case Mode::M6S:
    case Mode::M6L:
      os << "c = " << p.c << "\n";
      break;
    case Mode::M4L:
      os << "h = " << p.h << "\n";
      break;
    case Mode::WC:
      os << "k = " << p.k << "\n";
      break;
    default:
      break;
  }
  if (p.group_size) os << "nI = " << *p.group_size << "\n";
  if (p.interleave_bits) os << "I = " << *p.interleave_bits << "\n";
  os << "d = " << p.d << "\n";
  return os.str();
}

}  // namespace treehash
