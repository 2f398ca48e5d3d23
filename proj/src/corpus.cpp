#include "netscan/corpus.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "json.hpp"
#include "netscan/comb_loops.hpp"
#include "netscan/parser.hpp"

namespace fs = std::filesystem;

namespace netscan {

int CorpusSpec::total_malicious() const {
  return mux_ro + latch_ro + aes_like + des_like + sha_like + hidden;
}

int CorpusSpec::total() const {
  return total_malicious() + adder_tree + multiplier + lfsr + counter + spn_round + mux_tree;
}

std::string CorpusSpec::to_json() const {
  nlohmann::json j;
  j["seed"] = seed;
  j["size_scale"] = size_scale;
  j["malicious"] = {{"mux_ro", mux_ro},   {"latch_ro", latch_ro}, {"aes_like", aes_like},
                    {"des_like", des_like}, {"sha_like", sha_like}, {"hidden", hidden}};
  j["benign"] = {{"adder_tree", adder_tree}, {"multiplier", multiplier}, {"lfsr", lfsr},
                 {"counter", counter},       {"spn_round", spn_round},   {"mux_tree", mux_tree}};
  return j.dump(2);
}

CorpusSpec CorpusSpec::from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  CorpusSpec s;
  s.seed = j.value("seed", s.seed);
  s.size_scale = j.value("size_scale", s.size_scale);
  if (j.contains("malicious")) {
    const auto& m = j["malicious"];
    s.mux_ro = m.value("mux_ro", s.mux_ro);
    s.latch_ro = m.value("latch_ro", s.latch_ro);
    s.aes_like = m.value("aes_like", s.aes_like);
    s.des_like = m.value("des_like", s.des_like);
    s.sha_like = m.value("sha_like", s.sha_like);
    s.hidden = m.value("hidden", s.hidden);
  }
  if (j.contains("benign")) {
    const auto& b = j["benign"];
    s.adder_tree = b.value("adder_tree", s.adder_tree);
    s.multiplier = b.value("multiplier", s.multiplier);
    s.lfsr = b.value("lfsr", s.lfsr);
    s.counter = b.value("counter", s.counter);
    s.spn_round = b.value("spn_round", s.spn_round);
    s.mux_tree = b.value("mux_tree", s.mux_tree);
  }
  return s;
}

CorpusSpec CorpusSpec::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScanError(Err::MissingFile, path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

namespace {

struct ModuleBody {
  std::string text;
  std::vector<std::string> local_truth;  // local signal names of the malicious part
};

std::string wdecl(int w) { return w > 1 ? "[" + std::to_string(w - 1) + ":0] " : ""; }

// One register + mixing-network unit, the shared building block of the
// sequential attacks and the benign spn family. Reads `prev` (another unit's
// state or din) and writes st<i>/nx<i>.
void emit_mix_unit(std::ostringstream& o, int i, int w, const std::string& prev, Rng& rng,
                   std::vector<std::string>* truth) {
  const std::string st = "st" + std::to_string(i);
  const std::string nx = "nx" + std::to_string(i);
  const int rot = 1 + rng.next_below(std::max(1, w - 1));
  const int c = 1 + rng.next_below(200);
  const int sh = 1 + rng.next_below(3);
  o << "  reg " << wdecl(w) << st << ";\n";
  o << "  wire " << wdecl(w) << nx << ";\n";
  o << "  assign " << nx << " = ({" << st << "[" << rot - 1 << ":0], " << st << "["
    << w - 1 << ":" << rot << "]} ^ (" << st << " + " << c << ")) ^ (" << prev << " << " << sh
    << ");\n";
  o << "  always @(posedge clk) " << st << " <= " << nx << ";\n";
  if (truth) {
    truth->push_back(st);
    truth->push_back(nx);
  }
}

// xor-chain of signals reduced to one bit
std::string xor_reduce(const std::vector<std::string>& sigs) {
  std::string e = "(|" + sigs[0] + ")";
  for (size_t i = 1; i < sigs.size(); ++i) e = "(" + e + " ^ (|" + sigs[i] + "))";
  return e;
}

// Combinational filler shared by the RO families so loop nodes sit inside
// ordinary-looking logic.
std::vector<std::string> emit_filler(std::ostringstream& o, int stages, int w, Rng& rng) {
  std::vector<std::string> names;
  std::string prev = "din";
  for (int s = 0; s < stages; ++s) {
    const std::string f = "flt" + std::to_string(s);
    const int c = 1 + rng.next_below(100);
    const int sh = 1 + rng.next_below(3);
    o << "  wire " << wdecl(w) << f << ";\n";
    switch (rng.next_below(3)) {
      case 0:
        o << "  assign " << f << " = (" << prev << " + " << c << ") ^ (" << prev << " >> " << sh
          << ");\n";
        break;
      case 1:
        o << "  assign " << f << " = (" << prev << " & " << c << ") | (" << prev << " << " << sh
          << ");\n";
        break;
      default:
        o << "  assign " << f << " = (" << prev << " ^ " << c << ") + " << prev << "[" << sh
          << "];\n";
        break;
    }
    names.push_back(f);
    prev = f;
  }
  return names;
}

std::string module_header(const std::string& name, int w) {
  return "module " + name + "(input clk, input en, input " + wdecl(w) + "din, output out);\n";
}

ModuleBody body_mux_ro(const std::string& name, int w, int instances, Rng& rng) {
  if (instances < 1)
    throw ScanError(Err::GeneratorError, "mux-ro needs at least one instance (zero would be benign)");
  std::ostringstream o;
  o << module_header(name, w);
  ModuleBody body;
  std::vector<std::string> taps;
  for (int i = 0; i < instances; ++i) {
    const std::string r = "r" + std::to_string(i);
    o << "  wire " << r << ";\n";
    o << "  assign " << r << " = en ? ~" << r << " : 1'b0;\n";
    body.local_truth.push_back(r);
    taps.push_back(r);
  }
  auto filler = emit_filler(o, 2 + rng.next_below(3), w, rng);
  taps.push_back(filler.back());
  o << "  assign out = " << xor_reduce(taps) << ";\n";
  o << "endmodule\n";
  body.text = o.str();
  return body;
}

ModuleBody body_latch_ro(const std::string& name, int w, int instances, Rng& rng) {
  if (instances < 1)
    throw ScanError(Err::GeneratorError, "latch-ro needs at least one instance (zero would be benign)");
  std::ostringstream o;
  o << module_header(name, w);
  ModuleBody body;
  std::vector<std::string> taps;
  for (int i = 0; i < instances; ++i) {
    const std::string q = "q" + std::to_string(i);
    const std::string fb = "fb" + std::to_string(i);
    o << "  reg " << q << ";\n";
    o << "  wire " << fb << ";\n";
    o << "  assign " << fb << " = ~" << q << ";\n";
    o << "  always @(*) if (en) " << q << " = " << fb << ";\n";
    body.local_truth.push_back(q);
    body.local_truth.push_back(fb);
    taps.push_back(q);
  }
  auto filler = emit_filler(o, 2 + rng.next_below(3), w, rng);
  taps.push_back(filler.back());
  o << "  assign out = " << xor_reduce(taps) << ";\n";
  o << "endmodule\n";
  body.text = o.str();
  return body;
}

// `rounds` parallel two-stage chains, every chain head fed from din: the
// synchronized wide-fanout replication that makes the toggle fabric
// malicious. The benign spn family wires the same unit serially.
ModuleBody body_aes_like(const std::string& name, int w, int rounds, Rng& rng) {
  if (rounds < 1) throw ScanError(Err::GeneratorError, "sequential attack needs rounds >= 1");
  std::ostringstream o;
  o << module_header(name, w);
  ModuleBody body;
  std::vector<std::string> taps;
  for (int c = 0; c < rounds; ++c) {
    emit_mix_unit(o, 2 * c, w, "din", rng, &body.local_truth);
    emit_mix_unit(o, 2 * c + 1, w, "st" + std::to_string(2 * c), rng, &body.local_truth);
    taps.push_back("st" + std::to_string(2 * c + 1));
  }
  auto filler = emit_filler(o, 4 + rng.next_below(4), w, rng);
  taps.push_back(filler.back());
  o << "  assign out = en ? " << xor_reduce(taps) << " : 1'b0;\n";
  o << "endmodule\n";
  body.text = o.str();
  return body;
}

ModuleBody body_des_like(const std::string& name, int w, int rounds, Rng& rng) {
  if (rounds < 1) throw ScanError(Err::GeneratorError, "sequential attack needs rounds >= 1");
  std::ostringstream o;
  o << module_header(name, w);
  ModuleBody body;
  std::vector<std::string> taps;
  for (int i = 0; i < rounds; ++i) {
    const std::string l = "l" + std::to_string(i);
    const std::string r = "r" + std::to_string(i);
    const std::string f = "f" + std::to_string(i);
    const int key = 1 + rng.next_below(250);
    const int mask = 1 + rng.next_below(250);
    const int sh = 1 + rng.next_below(3);
    const std::string inject = " ^ din";  // every pair fed in parallel
    o << "  reg " << wdecl(w) << l << ";\n";
    o << "  reg " << wdecl(w) << r << ";\n";
    o << "  wire " << wdecl(w) << f << ";\n";
    o << "  assign " << f << " = ((" << r << " ^ " << key << ") + (" << r << " >> " << sh
      << ")) & " << mask << ";\n";
    o << "  always @(posedge clk) " << l << " <= " << r << ";\n";
    o << "  always @(posedge clk) " << r << " <= " << l << " ^ " << f << inject << ";\n";
    body.local_truth.push_back(l);
    body.local_truth.push_back(r);
    body.local_truth.push_back(f);
    taps.push_back(r);
  }
  auto filler = emit_filler(o, 4 + rng.next_below(4), w, rng);
  taps.push_back(filler.back());
  o << "  assign out = " << xor_reduce(taps) << ";\n";
  o << "endmodule\n";
  body.text = o.str();
  return body;
}

ModuleBody body_sha_like(const std::string& name, int w, int rounds, Rng& rng) {
  if (rounds < 1) throw ScanError(Err::GeneratorError, "sequential attack needs rounds >= 1");
  std::ostringstream o;
  o << module_header(name, w);
  ModuleBody body;
  std::vector<std::string> taps;
  for (int i = 0; i < rounds; ++i) {
    const std::string h = "h" + std::to_string(i);
    const std::string wv = "w" + std::to_string(i);
    const std::string prev = "din";  // parallel accumulators, shared source
    const int rot = 1 + rng.next_below(std::max(1, w - 1));
    const int c = 1 + rng.next_below(250);
    const int d = 1 + rng.next_below(250);
    o << "  reg " << wdecl(w) << h << ";\n";
    o << "  wire " << wdecl(w) << wv << ";\n";
    o << "  assign " << wv << " = ({" << h << "[" << rot - 1 << ":0], " << h << "[" << w - 1
      << ":" << rot << "]} + (" << h << " ^ " << c << ")) + ((" << prev << " | " << d << ") & "
      << h << ");\n";
    o << "  always @(posedge clk) " << h << " <= " << wv << ";\n";
    body.local_truth.push_back(h);
    body.local_truth.push_back(wv);
    taps.push_back(h);
  }
  auto filler = emit_filler(o, 4 + rng.next_below(4), w, rng);
  taps.push_back(filler.back());
  o << "  assign out = " << xor_reduce(taps) << ";\n";
  o << "endmodule\n";
  body.text = o.str();
  return body;
}

ModuleBody body_adder_tree(const std::string& name, int w, int leaves, Rng& rng) {
  std::ostringstream o;
  o << module_header(name, w);
  std::vector<std::string> level;
  for (int i = 0; i < leaves; ++i) {
    const std::string in = "a" + std::to_string(i);
    o << "  wire " << wdecl(w) << in << ";\n";
    o << "  assign " << in << " = (din >> " << i % std::max(1, w - 1) << ") + "
      << 1 + rng.next_below(50) << ";\n";
    level.push_back(in);
  }
  int tmp = 0;
  while (level.size() > 1) {
    std::vector<std::string> next;
    for (size_t i = 0; i + 1 < level.size(); i += 2) {
      const std::string s = "s" + std::to_string(tmp++);
      o << "  wire " << wdecl(w) << s << ";\n";
      o << "  assign " << s << " = " << level[i] << " + " << level[i + 1] << ";\n";
      next.push_back(s);
    }
    if (level.size() % 2 == 1) next.push_back(level.back());
    level = next;
  }
  o << "  reg " << wdecl(w) << "acc;\n";
  o << "  always @(posedge clk) acc <= " << level[0] << ";\n";
  o << "  assign out = |acc;\n";
  o << "endmodule\n";
  return {o.str(), {}};
}

ModuleBody body_multiplier(const std::string& name, int w, int stages, Rng& rng) {
  std::ostringstream o;
  o << module_header(name, w);
  std::string prev = "p0";
  o << "  wire " << wdecl(w) << "p0;\n";
  o << "  assign p0 = (din & " << 1 + rng.next_below(100) << ") * 3;\n";
  for (int i = 1; i < stages; ++i) {
    const std::string p = "p" + std::to_string(i);
    o << "  wire " << wdecl(w) << p << ";\n";
    o << "  assign " << p << " = " << prev << " + ((din << " << i % 4 << ") * din[" << i % std::max(1, w)
      << "]);\n";
    prev = p;
  }
  o << "  reg " << wdecl(w) << "prod;\n";
  o << "  always @(posedge clk) prod <= " << prev << ";\n";
  o << "  assign out = |prod;\n";
  o << "endmodule\n";
  return {o.str(), {}};
}

ModuleBody body_lfsr(const std::string& name, int w, int /*size*/, Rng& rng) {
  std::ostringstream o;
  o << module_header(name, w);
  const int t1 = rng.next_below(w);
  const int t2 = rng.next_below(w);
  o << "  reg " << wdecl(w) << "r;\n";
  o << "  wire fb;\n";
  o << "  assign fb = (r[" << w - 1 << "] ^ r[" << t1 << "]) ^ (r[" << t2 << "] ^ din[0]);\n";
  o << "  always @(posedge clk) r <= {r[" << w - 2 << ":0], fb};\n";
  o << "  assign out = |r;\n";
  o << "endmodule\n";
  return {o.str(), {}};
}

ModuleBody body_counter(const std::string& name, int w, int extras, Rng& rng) {
  std::ostringstream o;
  o << module_header(name, w);
  o << "  reg " << wdecl(w) << "c;\n";
  o << "  always @(posedge clk) if (en) c <= c + 1;\n";
  std::vector<std::string> taps;
  for (int i = 0; i < extras; ++i) {
    const std::string m = "m" + std::to_string(i);
    o << "  wire " << m << ";\n";
    o << "  assign " << m << " = c " << (i % 2 == 0 ? "==" : ">=") << " "
      << 1 + rng.next_below(1 << std::min(w, 8)) << ";\n";
    taps.push_back(m);
  }
  o << "  wire tick;\n";
  o << "  assign tick = c[" << w - 1 << "] && (din != 0);\n";
  taps.push_back("tick");
  o << "  assign out = " << xor_reduce(taps) << ";\n";
  o << "endmodule\n";
  return {o.str(), {}};
}

ModuleBody body_spn_round(const std::string& name, int w, int units, Rng& rng) {
  // benign analog of the aes-like fabric: same unit vocabulary, low
  // replication; the classifier has to read size/wiring, not node kinds
  std::ostringstream o;
  o << module_header(name, w);
  for (int i = 0; i < units; ++i) {
    const std::string prev = i == 0 ? std::string("din") : "st" + std::to_string(i - 1);
    emit_mix_unit(o, i, w, prev, rng, nullptr);
  }
  auto filler = emit_filler(o, 2 + rng.next_below(3), w, rng);
  o << "  assign out = en ? ((|st" << units - 1 << ") ^ (|" << filler.back() << ")) : 1'b0;\n";
  o << "endmodule\n";
  return {o.str(), {}};
}

ModuleBody body_mux_tree(const std::string& name, int w, int depth, Rng& rng) {
  // unrolled mux cascade: per-node vocabulary matches the mux-ro loop unit,
  // but the chain terminates in din instead of closing on itself
  std::ostringstream o;
  o << module_header(name, w);
  const int len = 1 + depth;
  for (int i = len - 1; i >= 0; --i) {
    const std::string c = "c" + std::to_string(i);
    const std::string nxt = i == len - 1 ? "din[" + std::to_string(rng.next_below(w)) + "]"
                                         : "c" + std::to_string(i + 1);
    o << "  wire " << c << ";\n";
    o << "  assign " << c << " = en ? ~" << nxt << " : 1'b0;\n";
  }
  auto filler = emit_filler(o, rng.next_below(2), w, rng);
  o << "  assign out = c0 ^ (|" << (filler.empty() ? std::string("din") : filler.back()) << ");\n";
  o << "endmodule\n";
  return {o.str(), {}};
}

ModuleBody make_family_body(const std::string& family, const std::string& name, int w, int repl,
                            Rng& rng) {
  if (family == "mux_ro") return body_mux_ro(name, w, repl, rng);
  if (family == "latch_ro") return body_latch_ro(name, w, repl, rng);
  if (family == "aes_like") return body_aes_like(name, w, repl, rng);
  if (family == "des_like") return body_des_like(name, w, repl, rng);
  if (family == "sha_like") return body_sha_like(name, w, repl, rng);
  if (family == "adder_tree") return body_adder_tree(name, w, repl, rng);
  if (family == "multiplier") return body_multiplier(name, w, repl, rng);
  if (family == "lfsr") return body_lfsr(name, w, repl, rng);
  if (family == "counter") return body_counter(name, w, repl, rng);
  if (family == "spn_round") return body_spn_round(name, w, repl, rng);
  if (family == "mux_tree") return body_mux_tree(name, w, repl, rng);
  throw ScanError(Err::GeneratorError, "unknown family '" + family + "'");
}

bool is_attack_family(const std::string& f) {
  return f == "mux_ro" || f == "latch_ro" || f == "aes_like" || f == "des_like" || f == "sha_like";
}

GeneratedSample wrap_single(const std::string& family, ModuleBody body, const std::string& name,
                            int label) {
  GeneratedSample s;
  s.stem = family;
  s.family = family;
  s.label = label;
  s.verilog = std::move(body.text);
  for (const auto& sig : body.local_truth) s.truth_signals.push_back(name + "." + sig);
  return s;
}

}  // namespace

GeneratedSample gen_mux_ro(int instances, uint64_t seed) {
  Rng rng(seed);
  const int w = 4 + rng.next_below(6);
  return wrap_single("mux_ro", body_mux_ro("mux_ro", w, instances, rng), "mux_ro", 1);
}

GeneratedSample gen_latch_ro(int instances, uint64_t seed) {
  Rng rng(seed);
  const int w = 4 + rng.next_below(6);
  return wrap_single("latch_ro", body_latch_ro("latch_ro", w, instances, rng), "latch_ro", 1);
}

GeneratedSample gen_sequential_attack(const std::string& family, int rounds, uint64_t seed) {
  if (family != "aes_like" && family != "des_like" && family != "sha_like")
    throw ScanError(Err::GeneratorError, "sequential family must be aes_like|des_like|sha_like");
  Rng rng(seed);
  const int w = 5 + rng.next_below(6);
  return wrap_single(family, make_family_body(family, family, w, rounds, rng), family, 1);
}

GeneratedSample gen_benign(const std::string& family, int size, uint64_t seed) {
  if (is_attack_family(family) || family == "hidden")
    throw ScanError(Err::GeneratorError, "'" + family + "' is not a benign family");
  Rng rng(seed);
  const int w = 4 + rng.next_below(9);
  return wrap_single(family, make_family_body(family, family, w, size, rng), family, 0);
}

GeneratedSample gen_hidden(const std::string& benign_family, const std::string& attack_family,
                           uint64_t seed) {
  if (!is_attack_family(attack_family))
    throw ScanError(Err::GeneratorError,
                    "hidden attack part must be an attack family, got '" + attack_family + "'");
  if (is_attack_family(benign_family))
    throw ScanError(Err::GeneratorError,
                    "hidden benign part must be a benign family, got '" + benign_family + "'");
  Rng rng(seed);
  const int w = 6 + rng.next_below(5);
  Rng brng = rng.split(1);
  Rng arng = rng.split(2);
  ModuleBody benign = make_family_body(benign_family, "bpart", w, 2 + brng.next_below(3), brng);
  const int rounds = attack_family == "mux_ro" || attack_family == "latch_ro"
                         ? 1 + arng.next_below(3)
                         : 2 + arng.next_below(3);
  ModuleBody attack = make_family_body(attack_family, "apart", w, rounds, arng);

  std::ostringstream o;
  o << benign.text << "\n" << attack.text << "\n";
  o << "module hidden_top(input clk, input en, input " << wdecl(w)
    << "din, output y, output z);\n";
  o << "  bpart b(.clk(clk), .en(en), .din(din), .out(y));\n";
  o << "  apart a(.clk(clk), .en(en), .din(din), .out(z));\n";
  o << "endmodule\n";

  GeneratedSample s;
  s.stem = "hidden";
  s.family = "hidden";
  s.label = 1;
  s.verilog = o.str();
  for (const auto& sig : attack.local_truth) s.truth_signals.push_back("hidden_top.a." + sig);
  return s;
}

namespace {

void write_file(const fs::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw ScanError(Err::IoError, "cannot write " + p.string());
  out << content;
}

// Truth node set: terminals named by the truth signals plus the operator
// nodes that drive them (named "<signal>:<Kind>:<k>").
TruthInfo resolve_truth(const Dfg& dfg, const std::vector<std::string>& signals) {
  TruthInfo t;
  t.signals = signals;
  std::vector<char> in_set(static_cast<size_t>(dfg.node_count()), 0);
  for (const auto& node : dfg.nodes) {
    for (const auto& sig : signals) {
      if (node.name == sig ||
          (node.name.size() > sig.size() + 1 && node.name.compare(0, sig.size(), sig) == 0 &&
           node.name[sig.size()] == ':')) {
        t.node_ids.push_back(node.id);
        in_set[static_cast<size_t>(node.id)] = 1;
        break;
      }
    }
  }
  for (const auto& [u, v] : dfg.edges)
    if (in_set[static_cast<size_t>(u)] && in_set[static_cast<size_t>(v)]) t.edges.emplace_back(u, v);
  return t;
}

std::string truth_to_json(const TruthInfo& t) {
  nlohmann::json j;
  j["signals"] = t.signals;
  j["nodes"] = t.node_ids;
  j["edges"] = nlohmann::json::array();
  for (const auto& [u, v] : t.edges) j["edges"].push_back(nlohmann::json::array({u, v}));
  return j.dump();
}

}  // namespace

TruthInfo load_truth(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScanError(Err::MissingFile, path);
  std::ostringstream ss;
  ss << in.rdbuf();
  nlohmann::json j = nlohmann::json::parse(ss.str());
  TruthInfo t;
  for (const auto& s : j.at("signals")) t.signals.push_back(s.get<std::string>());
  for (const auto& n : j.at("nodes")) t.node_ids.push_back(n.get<int>());
  for (const auto& e : j.at("edges")) t.edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
  return t;
}

CorpusManifest build_corpus(const CorpusSpec& spec, const std::string& out_dir) {
  fs::create_directories(out_dir);
  Rng master(spec.seed);
  const double sc = spec.size_scale;
  auto scaled = [&](int lo, int span, Rng& r) {
    return std::max(1, lo + static_cast<int>(sc * r.next_below(span)));
  };

  std::vector<GeneratedSample> samples;
  int uid = 0;
  auto emit = [&](GeneratedSample s) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "_%03d", uid++);
    s.stem += buf;
    samples.push_back(std::move(s));
  };

  for (int i = 0; i < spec.mux_ro; ++i) {
    Rng r = master.split(0x100 + static_cast<uint64_t>(i));
    emit(gen_mux_ro(scaled(1, 4, r), r.seed()));
  }
  for (int i = 0; i < spec.latch_ro; ++i) {
    Rng r = master.split(0x200 + static_cast<uint64_t>(i));
    emit(gen_latch_ro(scaled(1, 4, r), r.seed()));
  }
  for (int i = 0; i < spec.aes_like; ++i) {
    Rng r = master.split(0x300 + static_cast<uint64_t>(i));
    emit(gen_sequential_attack("aes_like", scaled(2, 3, r), r.seed()));
  }
  for (int i = 0; i < spec.des_like; ++i) {
    Rng r = master.split(0x400 + static_cast<uint64_t>(i));
    emit(gen_sequential_attack("des_like", scaled(2, 4, r), r.seed()));
  }
  for (int i = 0; i < spec.sha_like; ++i) {
    Rng r = master.split(0x500 + static_cast<uint64_t>(i));
    emit(gen_sequential_attack("sha_like", scaled(2, 4, r), r.seed()));
  }
  {
    const char* benigns[] = {"adder_tree", "multiplier", "lfsr", "counter", "spn_round", "mux_tree"};
    const char* attacks[] = {"aes_like", "des_like", "sha_like", "mux_ro", "latch_ro"};
    for (int i = 0; i < spec.hidden; ++i) {
      Rng r = master.split(0x600 + static_cast<uint64_t>(i));
      emit(gen_hidden(benigns[i % 6], attacks[i % 5], r.seed()));
    }
  }
  for (int i = 0; i < spec.adder_tree; ++i) {
    Rng r = master.split(0x700 + static_cast<uint64_t>(i));
    emit(gen_benign("adder_tree", scaled(4, 8, r), r.seed()));
  }
  for (int i = 0; i < spec.multiplier; ++i) {
    Rng r = master.split(0x800 + static_cast<uint64_t>(i));
    emit(gen_benign("multiplier", scaled(3, 6, r), r.seed()));
  }
  for (int i = 0; i < spec.lfsr; ++i) {
    Rng r = master.split(0x900 + static_cast<uint64_t>(i));
    emit(gen_benign("lfsr", 1, r.seed()));
  }
  for (int i = 0; i < spec.counter; ++i) {
    Rng r = master.split(0xa00 + static_cast<uint64_t>(i));
    emit(gen_benign("counter", scaled(2, 5, r), r.seed()));
  }
  for (int i = 0; i < spec.spn_round; ++i) {
    Rng r = master.split(0xb00 + static_cast<uint64_t>(i));
    emit(gen_benign("spn_round", scaled(4, 5, r), r.seed()));
  }
  for (int i = 0; i < spec.mux_tree; ++i) {
    Rng r = master.split(0xc00 + static_cast<uint64_t>(i));
    emit(gen_benign("mux_tree", scaled(1, 4, r), r.seed()));
  }

  Dataset ds;
  for (const auto& s : samples) {
    write_file(fs::path(out_dir) / (s.stem + ".v"), s.verilog);
    Dfg dfg;
    try {
      dfg = dfg_from_text(s.verilog);
    } catch (const ScanError& e) {
      throw ScanError(Err::GeneratorError,
                      "generated netlist " + s.stem + " failed the frontend: " + e.what());
    }
    if (dfg.node_count() < 3)
      throw ScanError(Err::GeneratorError, s.stem + " produced a degenerate graph");
    TruthInfo truth = resolve_truth(dfg, s.truth_signals);
    if (s.label == 1 && truth.node_ids.empty())
      throw ScanError(Err::GeneratorError, s.stem + " is malicious but has empty ground truth");
    if (s.label == 0 && !truth.node_ids.empty())
      throw ScanError(Err::GeneratorError, s.stem + " is benign but carries ground truth");
    if (s.label == 1) write_file(fs::path(out_dir) / (s.stem + ".truth.json"), truth_to_json(truth));

    Sample sample;
    sample.graph = std::move(dfg);
    sample.features = encode_features(sample.graph);
    sample.label = s.label;
    sample.family = s.family;
    sample.source_path = s.stem + ".json";
    ds.samples.push_back(std::move(sample));
  }

  const std::string manifest = (fs::path(out_dir) / "manifest.csv").string();
  save_dataset(ds, manifest);

  CorpusManifest out;
  out.manifest_path = manifest;
  out.total = static_cast<int>(ds.samples.size());
  for (const auto& s : ds.samples) (s.label == 1 ? out.malicious : out.benign)++;
  Dataset check = load_dataset(manifest);
  out.checksum = check.checksum;
  return out;
}

}  // namespace netscan
