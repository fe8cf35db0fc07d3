#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "treehash/treehash.hpp"

namespace treehash::cli {

namespace {

struct ModeFlags {
  std::string params_file;
  // key, raw value; filled by CLI11, applied in order after the params file
  std::vector<std::pair<std::string, std::string>> values;
};

void add_mode_flags(CLI::App* cmd, ModeFlags& flags, std::vector<std::unique_ptr<std::string>>& storage) {
  cmd->add_option("--params", flags.params_file, "key = value parameter file, applied before the flags");
  static const std::pair<const char*, const char*> kFlags[] = {
      {"mode", "tree mode: 1 2S 2L 3 4S 5S 6S 4L 5L 6L WC B1 B2 B3"},
      {"epsilon", "4S/5S/5L exponent, e.g. 1/2"},
      {"c", "5L/6S/6L base"},
      {"q", "2S/2L lane count"},
      {"B", "mode 1 chunk size in blocks"},
      {"h", "4L height"},
      {"k", "WC arity"},
      {"d", "sequential threshold"},
      {"nI", "4L group size (SIMD variant, h=2)"},
      {"I", "interleaving slice in bits"},
  };
  for (const auto& [key, help] : kFlags) {
    storage.push_back(std::make_unique<std::string>());
    std::string* slot = storage.back().get();
    std::string k = key;
    cmd->add_option("--" + k, *slot, help)->each([&flags, k](const std::string& v) {
      flags.values.emplace_back(k, v);
    });
  }
}

ModeParams resolve(const ModeFlags& flags) {
  ModeParams p;
  if (!flags.params_file.empty()) p = load_params_file(flags.params_file);
  for (const auto& [k, v] : flags.values) set_param(p, k, v);
  p.validate();
  return p;
}

// Reads exactly `limit` bytes when given, otherwise to the end.
ByteSource checked_source(std::istream& in, std::optional<std::uint64_t> limit) {
  auto seen = std::make_shared<std::uint64_t>(0);
  return [&in, limit, seen](std::span<std::uint8_t> out) -> std::size_t {
    std::size_t want = out.size();
    if (limit) want = static_cast<std::size_t>(std::min<std::uint64_t>(want, *limit - *seen));
    if (want == 0) return 0;
    in.read(reinterpret_cast<char*>(out.data()), static_cast<std::streamsize>(want));
    if (in.bad()) throw std::ios_base::failure("read error on input");
    auto got = static_cast<std::size_t>(in.gcount());
    *seen += got;
    if (limit && got < want) {
      throw std::ios_base::failure("input ended after " + std::to_string(*seen) + " bytes, --length is " +
                                   std::to_string(*limit));
    }
    return got;
  };
}

std::vector<std::uint8_t> read_all(const ByteSource& src) {
  std::vector<std::uint8_t> data;
  std::vector<std::uint8_t> buf(1 << 16);
  for (std::size_t got; (got = src(buf)) != 0;) data.insert(data.end(), buf.begin(), buf.begin() + got);
  return data;
}

struct HashArgs {
  std::string input = "-";
  std::optional<std::uint64_t> length;
  std::size_t out_bits = kChainingBits;
  std::size_t workers = 1;
  std::size_t buffer_k = 2;
  std::string strategy = "auto";
  bool report = false;
  std::string format = "text";
};

void print_report(std::ostream& os, const ExecReport& r, const std::string& strategy, const std::string& format) {
  if (format == "json") {
    nlohmann::json j;
    j["strategy"] = strategy;
    j["max_live_states"] = r.max_live_states;
    j["f_calls"] = r.f_calls;
    j["permutation_calls"] = r.permutation_calls;
    j["max_buffer_occupancy"] = r.max_buffer_occupancy;
    j["buffer_bound_violations"] = r.buffer_bound_violations;
    os << j.dump() << "\n";
    return;
  }
  os << "strategy " << strategy << "\n"
     << "max_live_states " << r.max_live_states << "\n"
     << "f_calls " << r.f_calls << "\n"
     << "permutation_calls " << r.permutation_calls << "\n"
     << "max_buffer_occupancy " << r.max_buffer_occupancy << "\n"
     << "buffer_bound_violations " << r.buffer_bound_violations << "\n";
}

int cmd_hash(const ModeFlags& flags, const HashArgs& a, std::istream& stdin_, std::ostream& out, std::ostream& err) {
  ModeParams p = resolve(flags);
  if (a.out_bits == 0) throw ConfigError("--out-bits must be positive");
  if (a.workers == 0) throw ConfigError("--workers must be positive");

  std::ifstream file;
  std::istream* in = &stdin_;
  std::optional<std::uint64_t> total = a.length;
  if (a.input != "-") {
    file.open(a.input, std::ios::binary);
    if (!file) throw std::ios_base::failure("cannot open " + a.input);
    in = &file;
    if (!total) total = std::filesystem::file_size(a.input);
  }
  if (!total && !is_live(p.mode)) {
    throw ModeError("mode " + std::string(mode_name(p.mode)) +
                    " needs the message length up front; pass --length when reading standard input");
  }

  std::string strategy = a.strategy;
  if (strategy == "auto") {
    if (a.workers == 1) {
      strategy = "seq";
    } else if (supports_parallel_stream(p) && a.input == "-") {
      strategy = "stream";
    } else {
      strategy = "stored";
    }
  }

  ExecOptions opts;
  opts.out_bits = a.out_bits;
  ByteSource src = checked_source(*in, total);
  ExecReport r;
  if (strategy == "seq") {
    r = hash_sequential(src, p, total, opts);
  } else if (strategy == "stored") {
    std::vector<std::uint8_t> msg = read_all(src);
    r = hash_parallel_stored(msg, p, a.workers, opts);
  } else {
    r = hash_parallel_stream(src, p, a.workers, a.buffer_k, opts);
  }
  out << to_hex(r.digest) << "\n";
  if (a.report) print_report(err, r, strategy, a.format);
  return kOk;
}

struct TopoArgs {
  std::optional<std::uint64_t> length;
  std::optional<std::uint64_t> blocks;
  std::string format = "text";
};

int cmd_topo(const ModeFlags& flags, const TopoArgs& a, std::ostream& out) {
  ModeParams p = resolve(flags);
  AritySchedule s(p);
  Topology t = a.blocks ? build_topology(s, *a.blocks) : build_topology_bytes(s, *a.length);
  if (a.format == "json") {
    nlohmann::json j;
    j["mode"] = std::string(mode_name(p.mode));
    j["bytes"] = t.message_bytes();
    j["blocks"] = t.n_blocks();
    j["levels"] = t.levels();
    out << j.dump() << "\n";
  } else {
    out << t.to_text();
  }
  return kOk;
}

struct DecodeArgs {
  std::string hex;
  std::optional<std::size_t> bits;
  std::string format = "text";
};

int cmd_decode(const DecodeArgs& a, std::istream& in, std::ostream& out) {
  std::string hex = a.hex;
  if (hex.empty() || hex == "-") hex.assign(std::istreambuf_iterator<char>(in), {});
  std::vector<std::uint8_t> bytes;
  try {
    bytes = from_hex(hex);
  } catch (const std::invalid_argument& e) {
    throw DecodeError(std::string("malformed hex: ") + e.what(), 0);
  }
  std::size_t nbits = a.bits.value_or(bytes.size() * 8);
  if (nbits > bytes.size() * 8) throw DecodeError("--bits exceeds the input length", bytes.size() * 8);
  DecodedNode d = decode_node(BitString::from_bytes(bytes, nbits));
  if (a.format == "json") {
    nlohmann::json j;
    j["type"] = d.kind.type == NodeType::Leaf ? "leaf" : "inner";
    j["root"] = d.kind.is_root;
    if (d.kind.type == NodeType::Inner) {
      j["arity"] = d.kind.arity;
      j["I"] = d.kind.interleave.infinite() ? nlohmann::json("inf") : nlohmann::json(d.kind.interleave.block_bits);
      if (d.kind.interleave.group_size) j["nI"] = *d.kind.interleave.group_size;
    }
    j["payload_bits"] = d.payload.size();
    out << j.dump() << "\n";
  } else {
    out << describe(d.kind) << " payload_bits=" << d.payload.size() << "\n";
  }
  return kOk;
}

struct AnalyzeArgs {
  std::vector<std::uint64_t> n;
  std::uint64_t a = 1;
  std::uint64_t b = 0;
  std::string arrival = "stored";
  std::uint64_t interval = 1;
  bool no_states = false;
  std::string format = "text";
};

int cmd_analyze(const ModeFlags& flags, const AnalyzeArgs& a, std::ostream& out) {
  ModeParams p = resolve(flags);
  GrowthOptions g;
  g.cost.a = a.a;
  g.cost.b = a.b;
  g.cost.arrival = a.arrival == "streamed" ? Arrival::Streamed : Arrival::Stored;
  g.cost.block_interval = a.interval;
  g.cost.validate();
  g.with_states = !a.no_states;
  auto rows = growth_report(p, a.n, g);
  out << (a.format == "json" ? growth_report_json(p, rows) : growth_report_text(p, rows));
  return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"Tree hashing over RawSHAKE256 with configurable tree modes", "treehash"};
  app.require_subcommand(1);
  // -h would clash with the 4L height flag --h
  app.set_help_flag("--help", "print help and exit");
  app.set_version_flag("--version", "treehash 0.1.0");

  std::vector<std::unique_ptr<std::string>> storage;
  ModeFlags flags;
  const auto formats = CLI::IsMember({"text", "json"});

  HashArgs ha;
  auto* hash = app.add_subcommand("hash", "hash a file or standard input");
  add_mode_flags(hash, flags, storage);
  hash->add_option("input", ha.input, "input file, - for standard input");
  hash->add_option("--length", ha.length, "message length in bytes (required for stored modes on a pipe)");
  hash->add_option("--out-bits", ha.out_bits, "digest length in bits");
  hash->add_option("--workers", ha.workers, "worker threads")->check(CLI::PositiveNumber);
  hash->add_option("--strategy", ha.strategy, "auto, seq, stored or stream")
      ->check(CLI::IsMember({"auto", "seq", "stored", "stream"}));
  hash->add_option("--buffer-k", ha.buffer_k, "stream strategy buffer factor")->check(CLI::PositiveNumber);
  hash->add_flag("--report", ha.report, "print an execution report on standard error");
  hash->add_option("--format", ha.format, "report format")->check(formats);

  TopoArgs ta;
  auto* topo = app.add_subcommand("topo", "print the node table of a message length");
  add_mode_flags(topo, flags, storage);
  auto* tlen = topo->add_option("--length", ta.length, "message length in bytes");
  auto* tblk = topo->add_option("--blocks", ta.blocks, "message length in 512-bit blocks");
  tlen->excludes(tblk);
  topo->add_option("--format", ta.format, "output format")->check(formats);

  DecodeArgs da;
  auto* decode = app.add_subcommand("decode", "parse a hex-encoded f-input");
  decode->add_option("hex", da.hex, "hex string, - or absent for standard input");
  decode->add_option("--bits", da.bits, "bit length when the input is not byte aligned");
  decode->add_option("--format", da.format, "output format")->check(formats);

  AnalyzeArgs aa;
  auto* analyze = app.add_subcommand("analyze", "growth report over message lengths in blocks");
  add_mode_flags(analyze, flags, storage);
  analyze->add_option("--n", aa.n, "comma separated block counts")->delimiter(',')->required();
  analyze->add_option("--a", aa.a, "cost per absorbed item");
  analyze->add_option("--b", aa.b, "cost per node");
  analyze->add_option("--arrival", aa.arrival, "stored or streamed")->check(CLI::IsMember({"stored", "streamed"}));
  analyze->add_option("--interval", aa.interval, "block interval for streamed arrival");
  analyze->add_flag("--no-states", aa.no_states, "skip the dry-run memory measurement");
  analyze->add_option("--format", aa.format, "output format")->check(formats);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*hash) return cmd_hash(flags, ha, in, out, err);
    if (*topo) {
      if (!ta.length && !ta.blocks) {
        err << "topo: one of --length or --blocks is required\n";
        return kUsage;
      }
      return cmd_topo(flags, ta, out);
    }
    if (*decode) return cmd_decode(da, in, out);
    return cmd_analyze(flags, aa, out);
  } catch (const DecodeError& e) {
    err << "treehash: " << e.what() << "\n";
    return kDecode;
  } catch (const ConfigError& e) {
    err << "treehash: " << e.what() << "\n";
    return kConfig;
  } catch (const ModeError& e) {
    err << "treehash: " << e.what() << "\n";
    return kConfig;
  } catch (const CodingError& e) {
    err << "treehash: " << e.what() << "\n";
    return kConfig;
  } catch (const std::ios_base::failure& e) {
    err << "treehash: " << e.what() << "\n";
    return kIo;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "treehash: " << e.what() << "\n";
    return kIo;
  } catch (const std::exception& e) {
    err << "treehash: " << e.what() << "\n";
    return kUsage;
  }
}

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"treehash"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), in, out, err);
}

}  // namespace treehash::cli
