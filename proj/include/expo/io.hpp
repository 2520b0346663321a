#pragma once

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <nlohmann/json.hpp>

#include "expo/annotate_types.hpp"
#include "expo/core.hpp"
#include "expo/errors.hpp"
#include "expo/panel.hpp"
#include "expo/records.hpp"

namespace expo {
namespace io {

// ---------------------------------------------------------------------------
// Small CSV helpers (RFC-4180-ish: quotes only when needed)

inline void append_csv_field(std::string& line, std::string_view field) {
  if (field.find_first_of(",\"\n") == std::string_view::npos) {
    line += field;
    return;
  }
  line += '"';
  for (char c : field) {
    if (c == '"') line += '"';
    line += c;
  }
  line += '"';
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') { cur += '"'; ++i; }
        else quoted = false;
      } else cur += c;
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(cur));
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(std::move(cur));
  return out;
}

inline double parse_double(const std::string& s, const char* what) {
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw Error(Err::IoError, std::string("bad number for ") + what + ": '" + s + "'");
  return v;
}

inline long parse_long(const std::string& s, const char* what) {
  long v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw Error(Err::IoError, std::string("bad integer for ") + what + ": '" + s + "'");
  return v;
}

inline std::string fmt_fixed4(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  if (buf[0] == '-' && std::strtod(buf, nullptr) == 0.0) return buf + 1;  // no "-0.0000"
  return buf;
}

inline std::string fmt_full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::ofstream open_out(const std::string& path) {
  std::filesystem::path p(path);
  if (p.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(p.parent_path(), ec);
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(Err::IoError, "cannot open '" + path + "' for writing");
  return f;
}

inline std::ifstream open_in(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(Err::IoError, "cannot open '" + path + "' for reading");
  return f;
}

/// "x.csv" -> "x.raw.csv"; other extensions get ".raw" appended.
inline std::string raw_companion_path(const std::string& path) {
  if (path.size() > 4 && path.substr(path.size() - 4) == ".csv")
    return path.substr(0, path.size() - 4) + ".raw.csv";
  return path + ".raw";
}

/// For reading: prefer the full-precision companion when it exists.
inline std::string resolve_precise(const std::string& path) {
  auto raw = raw_companion_path(path);
  if (std::filesystem::exists(raw)) return raw;
  return path;
}

// ---------------------------------------------------------------------------
// Report tables: 4-decimal display file plus full-precision raw companion

struct TableCell {
  bool is_number = false;
  std::string text;
  double num = 0.0;

  static TableCell str(std::string s) { return {false, std::move(s), 0.0}; }
  static TableCell val(double v) { return {true, {}, v}; }
  static TableCell count(long n) { return {false, std::to_string(n), 0.0}; }
};

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<TableCell>> rows;

  void add_row(std::vector<TableCell> cells) { rows.push_back(std::move(cells)); }
};

inline void write_table(const std::string& path, const Table& table) {
  auto emit = [&](const std::string& target, bool full) {
    auto f = open_out(target);
    std::string line;
    for (size_t i = 0; i < table.header.size(); ++i) {
      if (i) line += ',';
      append_csv_field(line, table.header[i]);
    }
    line += '\n';
    f << line;
    for (const auto& row : table.rows) {
      line.clear();
      for (size_t i = 0; i < row.size(); ++i) {
        if (i) line += ',';
        if (row[i].is_number)
          line += full ? fmt_full(row[i].num) : fmt_fixed4(row[i].num);
        else
          append_csv_field(line, row[i].text);
      }
      line += '\n';
      f << line;
    }
  };
  emit(path, false);
  emit(raw_companion_path(path), true);
}

// ---------------------------------------------------------------------------
// Posting analysis records (columnar)

inline constexpr std::string_view kPostingCsvHeader =
    "posting_id,date,occupation,seniority,industry,state,remote,internship,"
    "employment_type,weight,n_tasks,share_e0,share_e1,share_e2,alpha,beta,gamma";

/// Streams posting records to a display file and its raw companion.
class PostingRecordWriter {
 public:
  explicit PostingRecordWriter(const std::string& path)
      : display_(open_out(path)), raw_(open_out(raw_companion_path(path))) {
    display_ << kPostingCsvHeader << '\n';
    raw_ << kPostingCsvHeader << '\n';
  }

  void write(const PostingRecord& r) {
    line_.clear();
    append_csv_field(line_, r.posting_id);
    line_ += ',';
    line_ += format_date(r.date);
    line_ += ',';
    append_csv_field(line_, r.occupation);
    line_ += ',';
    line_ += seniority_name(r.seniority);
    line_ += ',';
    append_csv_field(line_, r.industry);
    line_ += ',';
    append_csv_field(line_, r.state);
    line_ += ',';
    line_ += r.remote;
    line_ += ',';
    line_ += r.internship;
    line_ += ',';
    line_ += r.employment;
    line_ += ',';
    size_t prefix = line_.size();

    char buf[40];
    auto add_num = [&](std::string& line, double v, bool full) {
      std::snprintf(buf, sizeof(buf), full ? "%.17g" : "%.4f", v);
      line += buf;
    };
    auto finish = [&](std::string& line, bool full) {
      add_num(line, r.weight, full);
      line += ',';
      line += std::to_string(r.n_tasks);
      for (double v : {r.share_e0, r.share_e1, r.share_e2, r.alpha, r.beta, r.gamma}) {
        line += ',';
        add_num(line, v, full);
      }
      line += '\n';
    };

    std::string tail = line_.substr(0, prefix);
    finish(line_, false);
    display_ << line_;
    finish(tail, true);
    raw_ << tail;
  }

 private:
  std::ofstream display_, raw_;
  std::string line_;
};

inline void write_posting_records(const std::string& path,
                                  const std::vector<PostingRecord>& records) {
  PostingRecordWriter w(path);
  for (const auto& r : records) w.write(r);
}

/// Streams records from a posting CSV (full-precision companion preferred).
inline long for_each_posting_record(const std::string& path,
                                    const std::function<void(const PostingRecord&)>& fn) {
  auto f = open_in(resolve_precise(path));
  std::string line;
  if (!std::getline(f, line)) throw Error(Err::IoError, "empty posting file '" + path + "'");
  auto header = split_csv_line(line);
  std::unordered_map<std::string, int> col;
  for (size_t i = 0; i < header.size(); ++i) col[header[i]] = static_cast<int>(i);
  for (const char* need : {"posting_id", "date", "occupation", "seniority", "industry"})
    if (!col.count(need))
      throw Error(Err::IoError, std::string("posting file misses column '") + need + "'");

  auto get = [&](const std::vector<std::string>& row, const char* name,
                 const char* fallback = "") -> std::string {
    auto it = col.find(name);
    if (it == col.end() || it->second >= static_cast<int>(row.size())) return fallback;
    return row[static_cast<size_t>(it->second)];
  };

  long n = 0;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    auto row = split_csv_line(line);
    PostingRecord r;
    r.posting_id = get(row, "posting_id");
    r.date = parse_date(get(row, "date"));
    r.occupation = get(row, "occupation");
    r.seniority = parse_seniority(get(row, "seniority"));
    r.industry = get(row, "industry");
    r.state = get(row, "state");
    r.remote = get(row, "remote", "NotRemote");
    r.internship = get(row, "internship", "NonIntern");
    r.employment = get(row, "employment_type", "FullTime");
    auto weight = get(row, "weight", "1");
    r.weight = weight.empty() ? 1.0 : parse_double(weight, "weight");
    auto tasks = get(row, "n_tasks", "0");
    r.n_tasks = tasks.empty() ? 0 : static_cast<int>(parse_long(tasks, "n_tasks"));
    r.share_e0 = parse_double(get(row, "share_e0", "0"), "share_e0");
    r.share_e1 = parse_double(get(row, "share_e1", "0"), "share_e1");
    r.share_e2 = parse_double(get(row, "share_e2", "0"), "share_e2");
    r.alpha = parse_double(get(row, "alpha", "0"), "alpha");
    r.beta = parse_double(get(row, "beta", "0"), "beta");
    r.gamma = parse_double(get(row, "gamma", "0"), "gamma");
    fn(r);
    ++n;
  }
  return n;
}

inline std::vector<PostingRecord> read_posting_records(const std::string& path) {
  std::vector<PostingRecord> out;
  for_each_posting_record(path, [&](const PostingRecord& r) { out.push_back(r); });
  return out;
}

// ---------------------------------------------------------------------------
// Annotation pipeline files (JSONL)

/// One posting input per line with optional analysis metadata.
struct RawPosting {
  PostingInput input;
  PostingRecord record;  // metadata portion; exposure fields stay zero
};

inline std::vector<RawPosting> read_postings_jsonl(const std::string& path) {
  auto f = open_in(path);
  std::vector<RawPosting> out;
  std::unordered_set<std::string> seen;
  std::string line;
  long lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("posting_id") ||
        !j["posting_id"].is_string() || j["posting_id"].get<std::string>().empty())
      throw Error(Err::IoError,
                  path + ":" + std::to_string(lineno) + ": bad posting record");
    RawPosting p;
    p.input.posting_id = j["posting_id"].get<std::string>();
    if (!seen.insert(p.input.posting_id).second)
      throw Error(Err::IoError, path + ":" + std::to_string(lineno) +
                                    ": duplicate posting_id '" + p.input.posting_id + "'");
    p.input.title = j.value("title", "");
    p.input.body = j.value("body", "");
    if (j.contains("specialized_skills"))
      p.input.specialized_skills = j["specialized_skills"].get<std::vector<std::string>>();
    if (j.contains("common_skills"))
      p.input.common_skills = j["common_skills"].get<std::vector<std::string>>();
    p.record.posting_id = p.input.posting_id;
    p.record.occupation = j.value("occupation", "");
    p.record.seniority = parse_seniority(j.value("seniority", ""));
    p.record.industry = j.value("industry", "");
    p.record.state = j.value("state", "");
    p.record.remote = j.value("remote", "NotRemote");
    p.record.internship = j.value("internship", "NonIntern");
    p.record.employment = j.value("employment_type", "FullTime");
    p.record.date = parse_date(j.value("date", "2021-01-01"));
    p.record.weight = j.value("weight", 1.0);
    out.push_back(std::move(p));
  }
  return out;
}

inline void write_postings_jsonl(const std::string& path, const std::vector<RawPosting>& postings) {
  auto f = open_out(path);
  for (const auto& p : postings) {
    nlohmann::ordered_json j;
    j["posting_id"] = p.input.posting_id;
    j["title"] = p.input.title;
    j["body"] = p.input.body;
    j["specialized_skills"] = p.input.specialized_skills;
    j["common_skills"] = p.input.common_skills;
    if (!p.record.occupation.empty()) j["occupation"] = p.record.occupation;
    j["seniority"] = seniority_name(p.record.seniority);
    if (!p.record.industry.empty()) j["industry"] = p.record.industry;
    if (!p.record.state.empty()) j["state"] = p.record.state;
    j["remote"] = p.record.remote;
    j["internship"] = p.record.internship;
    j["employment_type"] = p.record.employment;
    j["date"] = format_date(p.record.date);
    if (p.record.weight != 1.0) j["weight"] = p.record.weight;
    f << j.dump() << '\n';
  }
}

struct AnnotationRecord {
  std::string posting_id;
  std::vector<TaskAnnotation> tasks;
};

inline void append_json_string(std::string& out, std::string_view s) {
  out += '"';
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  out += '"';
}

// Serialized by hand: annotation files run to millions of lines and this is
// the hottest write path in the pipeline.
inline void append_annotation_line(std::string& out, const std::string& posting_id,
                                   const std::vector<TaskAnnotation>& tasks) {
  out += "{\"posting_id\":";
  append_json_string(out, posting_id);
  out += ",\"tasks\":[";
  bool first = true;
  for (const auto& t : tasks) {
    if (!first) out += ',';
    first = false;
    out += "{\"task_id\":";
    append_json_string(out, t.task_id);
    out += ",\"text\":";
    append_json_string(out, t.text);
    out += ",\"skill_group_id\":";
    append_json_string(out, t.skill.group_id);
    out += ",\"kind\":\"";
    out += skill_kind_name(t.skill.kind);
    out += "\",\"raw_weight\":";
    out += std::to_string(t.raw_weight);
    out += ",\"label\":\"";
    out += label_name(t.label);
    out += "\"}";
  }
  out += "]}\n";
}

class AnnotationWriter {
 public:
  explicit AnnotationWriter(const std::string& path) : f_(open_out(path)) {}

  void write(const std::string& posting_id, const std::vector<TaskAnnotation>& tasks) {
    line_.clear();
    append_annotation_line(line_, posting_id, tasks);
    f_ << line_;
  }

 private:
  std::ofstream f_;
  std::string line_;
};

namespace detail {

// SAX handler for one annotation line; avoids building a DOM on the hot
// read path.
struct AnnotationSax {
  AnnotationRecord rec;
  std::string error;
  int depth = 0;  // 1 = record object, 2 = one task object
  bool in_tasks = false;
  std::string key_name;

  bool bad(const std::string& why) {
    if (error.empty()) error = why;
    return false;
  }

  TaskAnnotation* task() { return rec.tasks.empty() ? nullptr : &rec.tasks.back(); }

  bool null() { return true; }
  bool boolean(bool) { return true; }
  bool number_integer(int64_t v) { return number_unsigned(static_cast<uint64_t>(v)); }
  bool number_unsigned(uint64_t v) {
    if (depth == 2 && key_name == "raw_weight" && task())
      task()->raw_weight = static_cast<int>(v);
    return true;
  }
  bool number_float(double, const std::string&) { return true; }
  bool binary(std::vector<uint8_t>&) { return true; }

  bool string(std::string& v) {
    if (depth == 1) {
      if (key_name == "posting_id") rec.posting_id = std::move(v);
    } else if (depth == 2 && task() != nullptr) {
      auto* t = task();
      if (key_name == "task_id") t->task_id = std::move(v);
      else if (key_name == "text") t->text = std::move(v);
      else if (key_name == "skill_group_id") t->skill.group_id = std::move(v);
      else if (key_name == "kind") {
        if (!try_parse_skill_kind(v, t->skill.kind)) return bad("bad skill kind '" + v + "'");
      } else if (key_name == "label") {
        if (!try_parse_label(v, t->label)) return bad("bad exposure label '" + v + "'");
      }
    }
    return true;
  }

  bool key(std::string& v) {
    key_name = std::move(v);
    return true;
  }

  bool start_object(size_t) {
    ++depth;
    if (depth == 2 && in_tasks) rec.tasks.emplace_back();
    return true;
  }
  bool end_object() {
    --depth;
    return true;
  }
  bool start_array(size_t) {
    if (depth == 1 && key_name == "tasks") in_tasks = true;
    return true;
  }
  bool end_array() {
    in_tasks = false;
    return true;
  }
  bool parse_error(size_t, const std::string&, const nlohmann::json::exception& e) {
    return bad(e.what());
  }
};

}  // namespace detail

inline long for_each_annotation(const std::string& path,
                                const std::function<void(AnnotationRecord&&)>& fn) {
  auto f = open_in(path);
  std::string line;
  long lineno = 0, n = 0;
  while (std::getline(f, line)) {
    ++lineno;
    if (line.empty()) continue;
    detail::AnnotationSax sax;
    bool ok = nlohmann::json::sax_parse(line, &sax);
    if (!ok || sax.rec.posting_id.empty())
      throw Error(Err::IoError, path + ":" + std::to_string(lineno) + ": bad annotation record" +
                                    (sax.error.empty() ? "" : " (" + sax.error + ")"));
    fn(std::move(sax.rec));
    ++n;
  }
  return n;
}

inline std::vector<AnnotationRecord> read_annotations(const std::string& path) {
  std::vector<AnnotationRecord> out;
  for_each_annotation(path, [&](AnnotationRecord&& r) { out.push_back(std::move(r)); });
  return out;
}

// Failure sidecar: one record per posting that failed, so reruns can target
// exactly those postings.

struct FailureLine {
  std::string posting_id;
  int stage = 0;
  std::string error;
  std::string message;
  int attempts = 0;
};

inline void write_failures(const std::string& path, const std::vector<FailureLine>& failures) {
  auto f = open_out(path);
  for (const auto& x : failures) {
    nlohmann::ordered_json j;
    j["posting_id"] = x.posting_id;
    j["stage"] = x.stage;
    j["error"] = x.error;
    j["message"] = x.message;
    j["attempts"] = x.attempts;
    f << j.dump() << '\n';
  }
}

inline std::vector<FailureLine> read_failures(const std::string& path) {
  auto f = open_in(path);
  std::vector<FailureLine> out;
  std::string line;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    auto j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) continue;
    FailureLine x;
    x.posting_id = j.value("posting_id", "");
    x.stage = j.value("stage", 0);
    x.error = j.value("error", "");
    x.message = j.value("message", "");
    x.attempts = j.value("attempts", 0);
    out.push_back(std::move(x));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Panel export/import

inline constexpr std::string_view kPanelCsvHeader =
    "occupation,seniority,industry,period,count,share,mean_exposure";

inline void export_panel(const std::string& path, const CellPanel& panel) {
  Table t;
  t.header = {"occupation", "seniority", "industry", "period",
              "count",      "share",     "mean_exposure"};
  for (const auto& [p, data] : panel.periods) {
    auto label = period_label(p);
    for (const auto& [cell, agg] : data.cells)
      t.add_row({TableCell::str(cell.occupation), TableCell::str(seniority_name(cell.seniority)),
                 TableCell::str(cell.industry), TableCell::str(label), TableCell::count(agg.count),
                 TableCell::val(agg.share), TableCell::val(agg.mean)});
  }
  write_table(path, t);
}

inline CellPanel import_panel(const std::string& path) {
  auto f = open_in(resolve_precise(path));
  std::string line;
  if (!std::getline(f, line)) throw Error(Err::IoError, "empty panel file '" + path + "'");
  auto header = split_csv_line(line);
  const std::vector<std::string> want = {"occupation", "seniority", "industry", "period",
                                         "count",      "share",     "mean_exposure"};
  if (header != want)
    throw Error(Err::IoError, "panel file '" + path + "' has an unexpected header");

  CellPanel panel;
  panel.index = {};
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    auto row = split_csv_line(line);
    if (row.size() != 7) throw Error(Err::IoError, "panel row needs 7 columns");
    CellKey cell{row[0], parse_seniority(row[1]), row[2]};
    PeriodId p = parse_period(row[3]);
    CellAgg agg;
    agg.count = parse_long(row[4], "count");
    agg.share = parse_double(row[5], "share");
    agg.mean = parse_double(row[6], "mean_exposure");
    agg.weight = agg.share;  // shares sum to one per period
    agg.sum_wv = agg.weight * agg.mean;
    auto& data = panel.periods[p];
    data.cells.emplace(cell, agg);
    data.total_count += agg.count;
  }
  for (auto& [_, data] : panel.periods) {
    KahanSum total;
    for (const auto& [__, agg] : data.cells) total.add(agg.weight);
    data.total_weight = total.value();
  }
  if (panel.periods.empty()) throw Error(Err::IoError, "panel file '" + path + "' has no rows");
  return panel;
}

}  // namespace io
}  // namespace expo
