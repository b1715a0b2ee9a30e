#include <json.hpp>

#include "specnego/io.hpp"

namespace specnego::io {

std::string metrics_csv(const sim::RunReport& r) {
  std::size_t served = 0, unserved = 0;
  for (const auto& [_, v] : r.per_su_response) (v ? served : unserved)++;

  std::string out = "metric,value\n";
  auto row = [&](std::string_view k, const std::string& v) {
    out.append(k).append(",").append(v).append("\n");
  };
  row("total_messages", std::to_string(r.total_messages));
  row("sent_messages", std::to_string(r.sent_messages));
  for (const auto& [kind, n] : r.msg_counts) {
    row("messages_" + std::string(protocol::to_string(kind)), std::to_string(n));
  }
  row("run_response", format_number(r.run_response));
  row("quiescent_at", format_number(r.quiescent_at));
  row("events", std::to_string(r.event_log.size()));
  row("allocations", std::to_string(r.allocations.size()));
  row("served_sus", std::to_string(served));
  row("unserved_sus", std::to_string(unserved));
  row("protocol_violations", std::to_string(r.violations.size()));
  for (const auto& [su, v] : r.per_su_response) {
    row("response_" + su, v ? format_number(*v) : std::string("unserved"));
  }
  return out;
}

std::string events_jsonl(const sim::RunReport& r) {
  std::string out;
  for (const auto& e : r.event_log) {
    // Keys in a fixed order so the output is byte-stable.
    nlohmann::ordered_json j;
    j["time"] = e.time;
    j["seq"] = e.seq;
    j["kind"] = e.kind ? "Deliver" : "AgentWake";
    j["from"] = e.from;
    j["to"] = e.to;
    j["payload_kind"] = e.kind ? nlohmann::ordered_json(std::string(protocol::to_string(*e.kind)))
                               : nlohmann::ordered_json(nullptr);
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::string allocations_csv(const sim::RunReport& r) {
  std::string out = "su_id,pu_id,cpu_id,granted_channels,price,alloc_time\n";
  for (const auto& a : r.allocations) {
    out += a.su_id + "," + a.offer.pu_id + "," + a.offer.cpu_id + "," +
           std::to_string(a.granted_channels) + "," + format_number(a.offer.price) + "," +
           format_number(a.offer.alloc_time) + "\n";
  }
  return out;
}

std::vector<std::filesystem::path> export_report(const sim::RunReport& report,
                                                 const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());
  const std::vector<std::filesystem::path> paths{dir / "metrics.csv", dir / "events.jsonl",
                                                 dir / "allocations.csv"};
  write_file(paths[0], metrics_csv(report));
  write_file(paths[1], events_jsonl(report));
  write_file(paths[2], allocations_csv(report));
  return paths;
}

std::string metrics_table_csv(const experiments::MetricsTable& t) {
  std::string out = "# " + std::string(experiments::to_string(t.id)) + ": " + t.title + "\n";
  for (const auto& n : t.notes) out += "# " + n + "\n";
  out += "label," + t.swept_name + ",total_messages,expected_messages,run_response,served,unserved";
  for (auto k : protocol::kAllMessageKinds) out += "," + std::string(protocol::to_string(k));
  out += "\n";
  for (const auto& r : t.rows) {
    out += r.label + "," + format_number(r.swept) + "," + std::to_string(r.total_messages) + "," +
           std::to_string(r.expected_messages) + "," + format_number(r.run_response) + "," +
           std::to_string(r.served) + "," + std::to_string(r.unserved);
    for (auto k : protocol::kAllMessageKinds) {
      auto it = r.per_kind.find(k);
      out += "," + std::to_string(it == r.per_kind.end() ? 0 : it->second);
    }
    out += "\n";
  }
  return out;
}

}  // namespace specnego::io
