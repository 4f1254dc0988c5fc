#include "infoshare/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "infoshare/errors.hpp"

namespace infoshare {

namespace {

using nlohmann::json;

// Line of the first occurrence of "key" in the document, for diagnostics.
int line_of_key(const std::string& text, const std::string& key) {
  const auto pos = text.find('"' + key + '"');
  if (pos == std::string::npos) return 0;
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(pos), '\n'));
}

struct FieldReader {
  const json& doc;
  const std::string& text;
  const std::string& source;

  [[noreturn]] void fail(const std::string& key, const std::string& msg) const {
    std::string where = source;
    if (int line = line_of_key(text, key)) where += ":" + std::to_string(line);
    throw ParseError(where + ": field '" + key + "': " + msg);
  }

  const json& require(const json& obj, const std::string& key) const {
    if (!obj.contains(key)) fail(key, "missing");
    return obj.at(key);
  }

  double number(const json& obj, const std::string& key) const {
    const json& v = require(obj, key);
    if (!v.is_number()) fail(key, "expected a number");
    return v.get<double>();
  }
};

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(line);
  while (std::getline(is, cur, sep)) out.push_back(cur);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

double parse_double(const std::string& s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw ParseError("bad number in CSV: '" + s + "'");
  return v;
}

long long parse_int(const std::string& s) {
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw ParseError("bad integer in CSV: '" + s + "'");
  return v;
}

std::string bits_string(const std::vector<std::uint8_t>& bits) {
  if (bits.empty()) return "-";
  std::string s;
  for (auto b : bits) s += b ? '1' : '0';
  return s;
}

std::vector<std::uint8_t> parse_bits(const std::string& s) {
  if (s == "-") return {};
  std::vector<std::uint8_t> out;
  for (char c : s) {
    if (c != '0' && c != '1') throw ParseError("bad message field in CSV: '" + s + "'");
    out.push_back(c == '1' ? 1 : 0);
  }
  return out;
}

json to_json(const ConditionReport& r) {
  json j;
  j["condition"] = to_string(r.id);
  j["holds"] = r.holds;
  j["context"] = r.context;
  json ev = json::object();
  for (const auto& [k, v] : r.evidence) ev[k] = v;
  j["evidence"] = ev;
  if (!r.notes.empty()) j["notes"] = r.notes;
  if (!r.sub_reports.empty()) {
    json subs = json::array();
    for (const auto& s : r.sub_reports) subs.push_back(to_json(s));
    j["sub_reports"] = subs;
  }
  return j;
}

}  // namespace

SpecFile parse_spec(const std::string& text, const std::string& source) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    const auto byte = std::min<std::size_t>(e.byte, text.size());
    const int line = 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(byte), '\n'));
    throw ParseError(source + ":" + std::to_string(line) + ": syntax error: " + e.what());
  }
  if (!doc.is_object()) throw ParseError(source + ": top level must be an object");
  FieldReader rd{doc, text, source};

  static const std::vector<std::string> known = {"n_firms", "gain", "L", "alpha", "epsilon", "delta",
                                                 "monitor_alpha", "monitor_epsilon", "seed"};
  for (const auto& [key, _] : doc.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) rd.fail(key, "unknown field");
  }

  SpecFile out;
  GameSpec& s = out.spec;
  const json& n = rd.require(doc, "n_firms");
  if (!n.is_number_integer()) rd.fail("n_firms", "expected an integer");
  s.n_firms = n.get<int>();
  s.loss = rd.number(doc, "L");
  s.alpha = rd.number(doc, "alpha");
  s.epsilon = rd.number(doc, "epsilon");
  s.discount = rd.number(doc, "delta");

  const json& g = rd.require(doc, "gain");
  if (!g.is_object()) rd.fail("gain", "expected an object");
  const json& kind = rd.require(g, "kind");
  if (!kind.is_string()) rd.fail("kind", "expected \"linear\" or \"concave\"");
  if (kind == "linear") {
    s.gain = LinearGain{rd.number(g, "G")};
  } else if (kind == "concave") {
    ConcaveGain cg{rd.number(g, "G"), {}};
    const json& f = rd.require(g, "f");
    if (!f.is_array()) rd.fail("f", "expected an array of numbers");
    for (const auto& v : f) {
      if (!v.is_number()) rd.fail("f", "expected an array of numbers");
      cg.f.push_back(v.get<double>());
    }
    s.gain = std::move(cg);
  } else {
    rd.fail("kind", "expected \"linear\" or \"concave\"");
  }

  const bool ma = doc.contains("monitor_alpha"), me = doc.contains("monitor_epsilon");
  if (ma != me) rd.fail(ma ? "monitor_alpha" : "monitor_epsilon", "monitor_alpha and monitor_epsilon go together");
  if (ma) s.monitor = Accuracy{rd.number(doc, "monitor_alpha"), rd.number(doc, "monitor_epsilon")};

  if (doc.contains("seed")) {
    const json& sd = doc.at("seed");
    if (!sd.is_number_unsigned()) rd.fail("seed", "expected a nonnegative integer");
    out.seed = sd.get<std::uint64_t>();
  }

  try {
    validate(s);
  } catch (const DomainError& e) {
    throw ParseError(source + ": invalid spec: " + e.what());
  }
  return out;
}

SpecFile load_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open spec file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_spec(ss.str(), path);
}

std::string format_double(double x) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc()) throw std::runtime_error("number formatting failed");
  return std::string(buf, ptr);
}

void write_trace_csv(std::ostream& os, const EpisodeTrace& trace) {
  const int n = trace.n_firms;
  const bool priv = trace.mode == MonitoringMode::Private;
  const bool promise = !trace.periods.empty() && trace.periods.front().promise.has_value();
  os << "period";
  for (int i = 1; i <= n; ++i) os << ",r_" << i;
  os << ",signal_index";
  if (priv) {
    for (int i = 1; i <= n; ++i) {
      for (int j = 1; j <= n; ++j) {
        if (i != j) os << ",b_" << i << '_' << j;
      }
    }
    for (int i = 1; i <= n; ++i) os << ",m_" << i;
  }
  for (int i = 1; i <= n; ++i) os << ",u_" << i;
  if (promise) {
    for (int i = 1; i <= n; ++i) os << ",v_" << i;
  }
  os << '\n';
  for (std::size_t t = 0; t < trace.periods.size(); ++t) {
    const auto& p = trace.periods[t];
    os << t;
    for (auto b : p.actions.bits()) os << ',' << int(b);
    os << ',' << p.signal.index();
    if (priv) {
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          if (i != j) os << ',' << int(p.beliefs->at(i, j));
        }
      }
      for (const auto& m : p.messages) os << ',' << bits_string(m);
    }
    for (double u : p.payoffs) os << ',' << format_double(u);
    if (promise) {
      for (double v : *p.promise) os << ',' << format_double(v);
    }
    os << '\n';
  }
}

EpisodeTrace read_trace_csv(std::istream& is, double discount) {
  std::string line;
  if (!std::getline(is, line)) throw ParseError("trace CSV is empty");
  const auto header = split(line, ',');
  int n = 0;
  for (const auto& h : header) n += h.rfind("u_", 0) == 0 ? 1 : 0;
  if (n < 2) throw ParseError("trace CSV header lacks payoff columns");
  EpisodeTrace tr;
  tr.n_firms = n;
  tr.discount = discount;
  tr.mode = std::find(header.begin(), header.end(), "m_1") != header.end() ? MonitoringMode::Private
                                                                            : MonitoringMode::Public;
  const bool priv = tr.mode == MonitoringMode::Private;
  const bool promise = std::find(header.begin(), header.end(), "v_1") != header.end();
  const std::size_t expected = 2 + static_cast<std::size_t>(n) * (2 + (priv ? n : 0) + (promise ? 1 : 0));
  if (header.size() != expected) throw ParseError("trace CSV header has an unexpected column count");

  int row = 1;
  while (std::getline(is, line)) {
    ++row;
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != expected) throw ParseError("trace CSV row " + std::to_string(row) + " has wrong column count");
    std::size_t c = 1;
    PeriodRecord p;
    std::vector<std::uint8_t> bits;
    for (int i = 0; i < n; ++i) bits.push_back(static_cast<std::uint8_t>(parse_int(f[c++])));
    p.actions = ActionProfile(bits);
    p.signal = PublicSignal::from_index(static_cast<std::uint64_t>(parse_int(f[c++])), n);
    if (priv) {
      PrivateSignalMatrix m(n);
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          if (i != j) m.set(i, j, parse_int(f[c++]) != 0);
        }
      }
      p.beliefs = std::move(m);
      for (int i = 0; i < n; ++i) p.messages.push_back(parse_bits(f[c++]));
    }
    for (int i = 0; i < n; ++i) p.payoffs.push_back(parse_double(f[c++]));
    if (promise) {
      std::vector<double> v;
      for (int i = 0; i < n; ++i) v.push_back(parse_double(f[c++]));
      p.promise = std::move(v);
    }
    tr.periods.push_back(std::move(p));
  }
  return tr;
}

void write_continuation_csv(std::ostream& os, const ContinuationMap& map) {
  const std::size_t n = map.gamma_bar.empty() ? 0 : map.gamma_bar.front().size();
  // signal_index: bit j-1 holds b_j (firm 1 least significant).
  os << "signal_index";
  for (std::size_t j = 1; j <= n; ++j) os << ",b_" << j;
  for (std::size_t i = 1; i <= n; ++i) os << ",gamma_bar_" << i;
  os << '\n';
  for (std::size_t b = 0; b < map.gamma_bar.size(); ++b) {
    os << b;
    for (std::size_t j = 0; j < n; ++j) os << ',' << ((b >> j) & 1u);
    for (double g : map.gamma_bar[b]) os << ',' << format_double(g);
    os << '\n';
  }
}

void write_vertices_csv(std::ostream& os, const std::vector<std::vector<double>>& vertices) {
  const std::size_t n = vertices.empty() ? 2 : vertices.front().size();
  for (std::size_t i = 1; i <= n; ++i) os << (i > 1 ? "," : "") << "v_" << i;
  os << '\n';
  for (const auto& v : vertices) {
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << format_double(v[i]);
    os << '\n';
  }
}

void write_halfspaces_csv(std::ostream& os, const std::vector<HalfSpace>& halfspaces) {
  const int n = halfspaces.empty() ? 2 : halfspaces.front().lambda.size();
  for (int i = 1; i <= n; ++i) os << "lambda_" << i << ',';
  os << "k,best_action\n";
  for (const auto& h : halfspaces) {
    for (int i = 0; i < n; ++i) os << format_double(h.lambda[static_cast<std::size_t>(i)]) << ',';
    os << format_double(h.k) << ',' << '"' << h.best_action.to_string() << '"' << '\n';
  }
}

std::string report_json(const ConditionReport& report, int indent) { return to_json(report).dump(indent); }

std::string assumptions_json(const AssumptionReport& r, int indent) {
  json j;
  j["a1_holds"] = r.a1_holds;
  j["a2_holds"] = r.a2_holds;
  j["a2prime_holds"] = r.a2prime_holds;
  json w = json::object();
  if (r.a1_witness) w["a1"] = *r.a1_witness;
  if (r.a2_witness) w["a2"] = *r.a2_witness;
  if (r.a2prime_witness) w["a2prime"] = *r.a2prime_witness;
  j["witnesses"] = w;
  return j.dump(indent);
}

}  // namespace infoshare
