#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "specnego/error.hpp"
#include "specnego/io.hpp"

namespace specnego::io {

using nlohmann::json;

namespace {

std::string join_violations(const std::vector<Violation>& v) {
  std::string out = "scenario is invalid:";
  for (const auto& x : v) out += "\n  " + x.path + ": " + x.message;
  return out;
}

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
  throw ParseError(path + ": " + msg);
}

void allow_only(const json& obj, const std::string& path, std::initializer_list<const char*> keys) {
  if (!obj.is_object()) fail(path, "expected an object");
  for (const auto& [k, _] : obj.items()) {
    if (std::none_of(keys.begin(), keys.end(), [&](const char* key) { return k == key; })) {
      fail(path + "." + k, "unknown field");
    }
  }
}

const json& need(const json& obj, const std::string& path, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) fail(path + "." + key, "missing required field");
  return *it;
}

double number(const json& v, const std::string& path) {
  if (!v.is_number()) fail(path, "expected a number");
  return v.get<double>();
}

int integer(const json& v, const std::string& path) {
  if (!v.is_number_integer()) fail(path, "expected an integer");
  const auto x = v.get<std::int64_t>();
  if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max()) {
    fail(path, "integer out of range");
  }
  return static_cast<int>(x);
}

std::string text(const json& v, const std::string& path) {
  if (!v.is_string()) fail(path, "expected a string");
  return v.get<std::string>();
}

Zone zone(const json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 2) fail(path, "expected [x, y]");
  return Zone{number(v[0], path + "[0]"), number(v[1], path + "[1]")};
}

template <typename F>
void each(const json& doc, const std::string& path, const char* key, F&& f) {
  auto it = doc.find(key);
  if (it == doc.end()) return;
  if (!it->is_array()) fail(path + key, "expected an array");
  for (std::size_t i = 0; i < it->size(); ++i) {
    f((*it)[i], std::string(key) + "[" + std::to_string(i) + "]");
  }
}

Membership membership(const json& v, const std::string& path) {
  if (!v.is_object()) fail(path, "expected an object of coordinator -> member ids");
  Membership m;
  for (const auto& [coord, members] : v.items()) {
    const auto p = path + "." + coord;
    if (!members.is_array()) fail(p, "expected an array of ids");
    auto& slot = m[coord];
    for (std::size_t i = 0; i < members.size(); ++i) {
      slot.push_back(text(members[i], p + "[" + std::to_string(i) + "]"));
    }
    std::sort(slot.begin(), slot.end());
  }
  return m;
}

json membership_json(const Membership& m) {
  json out = json::object();
  for (const auto& [coord, members] : m) out[coord] = members;
  return out;
}

}  // namespace

ValidationError::ValidationError(std::vector<Violation> violations)
    : std::runtime_error(join_violations(violations)), violations_(std::move(violations)) {}

Scenario parse_scenario_unchecked(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("$: malformed JSON: ") + e.what());
  }
  allow_only(doc, "$", {"seed", "topology", "aggregation", "weights", "timing", "pus", "sus",
                        "cpu_coordinators", "csu_coordinators", "memberships"});

  Scenario s;
  if (auto it = doc.find("seed"); it != doc.end()) {
    if (!it->is_number_unsigned()) fail("$.seed", "expected an unsigned integer");
    s.seed = it->get<std::uint64_t>();
  }
  {
    const auto t = text(need(doc, "$", "topology"), "$.topology");
    auto topo = parse_topology(t);
    if (!topo) fail("$.topology", "expected no_coalition, cpu_only or cpu_csu, got '" + t + "'");
    s.topology = *topo;
  }
  if (auto it = doc.find("aggregation"); it != doc.end()) {
    if (!it->is_boolean()) fail("$.aggregation", "expected a boolean");
    s.aggregation = it->get<bool>();
  }
  if (auto it = doc.find("weights"); it != doc.end()) {
    if (!it->is_array() || it->size() != 3) fail("$.weights", "expected 3 numbers");
    for (std::size_t j = 0; j < 3; ++j) {
      s.weights[j] = number((*it)[j], "$.weights[" + std::to_string(j) + "]");
    }
  }
  if (auto it = doc.find("timing"); it != doc.end()) {
    allow_only(*it, "$.timing",
               {"latency", "agg_per_demand", "cpu_select", "rank_per_offer", "pu_reply"});
    auto opt = [&](const char* key, double& dst) {
      if (auto f = it->find(key); f != it->end()) dst = number(*f, std::string("$.timing.") + key);
    };
    opt("latency", s.timing.latency);
    opt("agg_per_demand", s.timing.agg_per_demand);
    opt("cpu_select", s.timing.cpu_select);
    opt("rank_per_offer", s.timing.rank_per_offer);
    opt("pu_reply", s.timing.pu_reply);
  }

  each(doc, "$.", "pus", [&](const json& v, const std::string& rel) {
    const auto p = "$." + rel;
    allow_only(v, p, {"id", "zone", "channels", "price", "alloc_time"});
    PrimaryUser pu;
    pu.id = text(need(v, p, "id"), p + ".id");
    pu.zone = zone(need(v, p, "zone"), p + ".zone");
    pu.channels = integer(need(v, p, "channels"), p + ".channels");
    pu.price = number(need(v, p, "price"), p + ".price");
    pu.alloc_time = number(need(v, p, "alloc_time"), p + ".alloc_time");
    s.pus.push_back(std::move(pu));
  });
  each(doc, "$.", "sus", [&](const json& v, const std::string& rel) {
    const auto p = "$." + rel;
    allow_only(v, p, {"id", "zone", "channels_requested", "arrival_time"});
    SecondaryUser su;
    su.id = text(need(v, p, "id"), p + ".id");
    su.zone = zone(need(v, p, "zone"), p + ".zone");
    su.channels_requested = integer(need(v, p, "channels_requested"), p + ".channels_requested");
    su.arrival_time = number(need(v, p, "arrival_time"), p + ".arrival_time");
    s.sus.push_back(std::move(su));
  });
  auto coordinators = [&](const char* key, std::vector<Coordinator>& dst) {
    each(doc, "$.", key, [&](const json& v, const std::string& rel) {
      const auto p = "$." + rel;
      allow_only(v, p, {"id", "zone"});
      dst.push_back(Coordinator{text(need(v, p, "id"), p + ".id"), zone(need(v, p, "zone"), p + ".zone")});
    });
  };
  coordinators("cpu_coordinators", s.cpu_coordinators);
  coordinators("csu_coordinators", s.csu_coordinators);

  if (auto it = doc.find("memberships"); it != doc.end()) {
    allow_only(*it, "$.memberships", {"cpu", "csu"});
    if (auto c = it->find("cpu"); c != it->end()) s.cpu_memberships = membership(*c, "$.memberships.cpu");
    if (auto c = it->find("csu"); c != it->end()) s.csu_memberships = membership(*c, "$.memberships.csu");
  }
  return s;
}

Scenario parse_scenario(std::string_view json_text) {
  Scenario s = parse_scenario_unchecked(json_text);
  if (auto v = validate(s); !v.empty()) throw ValidationError(std::move(v));
  return s;
}

std::string serialize_scenario(const Scenario& s) {
  json doc = json::object();
  doc["seed"] = s.seed;
  doc["topology"] = std::string(to_string(s.topology));
  doc["aggregation"] = s.aggregation;
  doc["weights"] = {s.weights[0], s.weights[1], s.weights[2]};
  doc["timing"] = {{"latency", s.timing.latency},
                   {"agg_per_demand", s.timing.agg_per_demand},
                   {"cpu_select", s.timing.cpu_select},
                   {"rank_per_offer", s.timing.rank_per_offer},
                   {"pu_reply", s.timing.pu_reply}};
  doc["pus"] = json::array();
  for (const auto& p : s.pus) {
    doc["pus"].push_back({{"id", p.id},
                          {"zone", {p.zone.x, p.zone.y}},
                          {"channels", p.channels},
                          {"price", p.price},
                          {"alloc_time", p.alloc_time}});
  }
  doc["sus"] = json::array();
  for (const auto& u : s.sus) {
    doc["sus"].push_back({{"id", u.id},
                          {"zone", {u.zone.x, u.zone.y}},
                          {"channels_requested", u.channels_requested},
                          {"arrival_time", u.arrival_time}});
  }
  auto coords = [](const std::vector<Coordinator>& cs) {
    json arr = json::array();
    for (const auto& c : cs) arr.push_back({{"id", c.id}, {"zone", {c.zone.x, c.zone.y}}});
    return arr;
  };
  doc["cpu_coordinators"] = coords(s.cpu_coordinators);
  doc["csu_coordinators"] = coords(s.csu_coordinators);
  if (s.cpu_memberships || s.csu_memberships) {
    json m = json::object();
    if (s.cpu_memberships) m["cpu"] = membership_json(*s.cpu_memberships);
    if (s.csu_memberships) m["csu"] = membership_json(*s.csu_memberships);
    doc["memberships"] = std::move(m);
  }
  return doc.dump(2) + "\n";
}

std::string format_number(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) return "nan";
  return std::string(buf, end);
}

// --- TOPSIS CSV -----------------------------------------------------------

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_row(std::string_view line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    cells.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

double csv_number(const std::string& cell, std::size_t line, std::size_t col) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc{} || ptr != cell.data() + cell.size()) {
    throw ParseError("line " + std::to_string(line) + ", column " + std::to_string(col + 1) +
                     ": expected a number, got '" + cell + "'");
  }
  return v;
}

}  // namespace

mcdm::DecisionMatrix parse_decision_csv(std::string_view csv_text) {
  std::vector<std::pair<std::size_t, std::vector<std::string>>> rows;
  std::size_t line_no = 0;
  std::istringstream in{std::string(csv_text)};
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (trim(line).empty()) continue;
    rows.emplace_back(line_no, split_row(line));
  }
  if (rows.size() < 4) {
    throw ParseError("expected header, weight and sense rows plus at least one alternative");
  }
  const auto& header = rows[0].second;
  if (header.size() < 2) throw ParseError("line 1: need at least one criterion column");
  const std::size_t n = header.size() - 1;
  for (const auto& [ln, cells] : rows) {
    if (cells.size() != n + 1) {
      throw ParseError("line " + std::to_string(ln) + ": expected " + std::to_string(n + 1) +
                       " cells, got " + std::to_string(cells.size()));
    }
  }

  mcdm::DecisionMatrix dm;
  dm.criteria.assign(header.begin() + 1, header.end());
  for (std::size_t j = 0; j < n; ++j) dm.weights.push_back(csv_number(rows[1].second[j + 1], rows[1].first, j + 1));
  for (std::size_t j = 0; j < n; ++j) {
    std::string s = rows[2].second[j + 1];
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    if (s == "benefit") {
      dm.senses.push_back(mcdm::CriterionSense::Benefit);
    } else if (s == "cost") {
      dm.senses.push_back(mcdm::CriterionSense::Cost);
    } else {
      throw ParseError("line " + std::to_string(rows[2].first) + ", column " +
                       std::to_string(j + 2) + ": sense must be benefit or cost");
    }
  }
  std::vector<double> data;
  for (std::size_t r = 3; r < rows.size(); ++r) {
    const auto& [ln, cells] = rows[r];
    dm.alternatives.push_back(cells[0]);
    for (std::size_t j = 0; j < n; ++j) data.push_back(csv_number(cells[j + 1], ln, j + 1));
  }
  dm.scores = mcdm::Matrix(rows.size() - 3, n, std::move(data));
  try {
    dm.check();
  } catch (const StructuralError& e) {
    throw ParseError(e.what());
  }
  return dm;
}

std::string format_topsis_csv(const mcdm::DecisionMatrix& matrix,
                              const mcdm::TopsisResult& result) {
  std::vector<std::size_t> rank(result.ranking.size());
  for (std::size_t pos = 0; pos < result.ranking.size(); ++pos) rank[result.ranking[pos]] = pos + 1;
  std::string out = "alternative,closeness,rank\n";
  for (std::size_t i = 0; i < matrix.alternatives.size(); ++i) {
    out += matrix.alternatives[i] + "," + format_number(result.closeness[i]) + "," +
           std::to_string(rank[i]) + "\n";
  }
  return out;
}

void write_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
  f.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!f) throw std::runtime_error("write failed for " + path.string());
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace specnego::io
