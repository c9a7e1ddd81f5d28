#include "clem/transcript.hpp"

#include <map>

namespace clem {

namespace {

constexpr std::string_view kStyle = R"(body{font-family:Helvetica,Arial,sans-serif;max-width:52em;margin:2em auto;background:#fafafa;color:#111}
.header{border-bottom:1px solid #ccc;margin-bottom:1em;padding-bottom:.5em}
.header td{padding:0 1em 0 0}
.msg{margin:.6em 0;padding:.5em .8em;border-radius:8px;max-width:80%}
.msg pre{white-space:pre-wrap;font-family:inherit;margin:.2em 0 0 0}
.label{font-size:.75em;color:#666}
.gm{background:#f0f0f0;color:#8a8a8a;font-weight:300}
.player{background:#e4eefc;color:#111;font-weight:600}
.side-0{margin-right:auto}
.side-1{margin-left:auto}
.note{font-size:.8em;color:#777;font-style:italic;margin:.2em 0 .2em 1em}
.violation{color:#b35900}
.outcome{font-weight:bold;margin-top:1em}
.notice{background:#fde8e8;color:#8b0000;padding:.5em .8em;border-radius:6px;margin:1em 0})";

std::string content_text(const Json& content) {
  return content.is_string() ? content.get<std::string>() : content.dump();
}

std::string field(const Json& content, const char* key) {
  if (content.is_object() && content.contains(key) && content[key].is_string()) return content[key].get<std::string>();
  return {};
}

}  // namespace

std::string html_escape(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&#39;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string transcribe_html(const EpisodeRecord& record) {
  if (auto problems = check_event_log(record); !problems.empty()) {
    throw ValidationError("refusing to render transcript: " + problems.front());
  }

  std::map<std::string, int> side;
  for (const auto& [role, _] : record.player_models) side.emplace(role, static_cast<int>(side.size()) % 2);

  const std::string title = record.game_name + " / " + record.experiment_name + " / episode " +
                            std::to_string(record.instance_id);
  std::string h;
  h += "<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n<title>";
  h += html_escape(title);
  h += "</title>\n<style>\n";
  h += kStyle;
  h += "\n</style>\n</head>\n<body>\n<div class=\"header\">\n<h2>" + html_escape(title) + "</h2>\n<table>\n";
  auto row = [&](const std::string& k, const std::string& v) {
    h += "<tr><td>" + html_escape(k) + "</td><td>" + html_escape(v) + "</td></tr>\n";
  };
  row("game", record.game_name);
  row("experiment", record.experiment_name);
  row("instance", std::to_string(record.instance_id));
  for (const auto& [role, model] : record.player_models) row("player " + role, model);
  row("outcome", std::string(to_string(record.outcome)));
  row("final turn", std::to_string(record.final_turn));
  h += "</table>\n</div>\n";

  bool any_player_event = false;
  std::string abort_cause;
  h += "<div class=\"chat\">\n";
  for (const auto& ev : record.events) {
    const std::string attrs = " data-seq=\"" + std::to_string(ev.seq) + "\" data-kind=\"" +
                              std::string(to_string(ev.kind)) + "\" data-turn=\"" + std::to_string(ev.turn) + "\"";
    switch (ev.kind) {
      case EventKind::send_message:
        any_player_event = true;
        h += "<div class=\"msg gm side-" + std::to_string(side[ev.target]) + "\"" + attrs + ">";
        h += "<div class=\"label\">GM to " + html_escape(ev.target) + " (turn " + std::to_string(ev.turn) + ")</div>";
        h += "<pre>" + html_escape(content_text(ev.content)) + "</pre></div>\n";
        break;
      case EventKind::get_response:
        any_player_event = true;
        h += "<div class=\"msg player side-" + std::to_string(side[ev.source]) + "\"" + attrs + ">";
        h += "<div class=\"label\">" + html_escape(ev.source) + " to GM</div>";
        h += "<pre>" + html_escape(content_text(ev.content)) + "</pre></div>\n";
        break;
      case EventKind::parse_ok:
        h += "<div class=\"note\"" + attrs + ">parsed move: " + html_escape(field(ev.content, "payload")) + "</div>\n";
        break;
      case EventKind::violation:
        h += "<div class=\"note violation\"" + attrs + ">" + html_escape(field(ev.content, "type")) +
             " violation: " + html_escape(field(ev.content, "reason")) + "</div>\n";
        break;
      case EventKind::metadata:
        h += "<div class=\"note meta\"" + attrs + ">" + html_escape(content_text(ev.content)) + "</div>\n";
        break;
      case EventKind::abort:
        abort_cause = field(ev.content, "cause");
        [[fallthrough]];
      case EventKind::lose:
      case EventKind::success: {
        std::string reason = field(ev.content, ev.kind == EventKind::abort ? "cause" : "reason");
        h += "<div class=\"outcome\"" + attrs + ">Game Master: " + std::string(to_string(ev.kind));
        if (!reason.empty()) h += " (" + html_escape(reason) + ")";
        h += "</div>\n";
        break;
      }
    }
  }
  h += "</div>\n";
  if (record.outcome == Outcome::aborted) {
    h += "<div class=\"notice\">Episode aborted";
    if (!abort_cause.empty()) h += ": " + html_escape(abort_cause);
    if (!any_player_event) h += " before any player move";
    h += ".</div>\n";
  }
  h += "</body>\n</html>\n";
  return h;
}

}  // namespace clem
