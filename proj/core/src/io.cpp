#include "scalelab/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace scalelab::io {

using nlohmann::json;

std::string fmt_double(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write " + path);
  out << content;
}

namespace {

double require_number(const json& j, const char* key, size_t line) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_number())
    throw ParseError("line " + std::to_string(line) + ": missing or non-numeric field '" +
                     key + "'");
  return it->get<double>();
}

uint64_t require_unsigned(const json& j, const char* key, size_t line) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_number_unsigned())
    throw ParseError("line " + std::to_string(line) +
                     ": missing or non-integer field '" + key + "'");
  return it->get<uint64_t>();
}

} // namespace

std::vector<RunRecord> read_runs_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  std::vector<RunRecord> out;
  std::string linebuf;
  size_t lineno = 0;
  while (std::getline(in, linebuf)) {
    ++lineno;
    if (linebuf.empty()) continue;
    json j = json::parse(linebuf, nullptr, false);
    if (j.is_discarded())
      throw ParseError("line " + std::to_string(lineno) + ": invalid JSON");
    RunRecord r;
    auto dit = j.find("domain");
    if (dit == j.end() || !dit->is_string())
      throw ParseError("line " + std::to_string(lineno) + ": missing or non-string field 'domain'");
    r.domain = dit->get<std::string>();
    r.n_params = require_unsigned(j, "n_params", lineno);
    r.dft_tokens = require_unsigned(j, "dft_tokens", lineno);
    r.p = require_number(j, "p", lineno);
    r.min_val_ft_loss = require_number(j, "min_val_ft_loss", lineno);
    r.pt_loss_at_min = require_number(j, "pt_loss_at_min", lineno);
    r.steps_to_min = require_unsigned(j, "steps_to_min", lineno);
    r.seq_len = static_cast<int>(require_unsigned(j, "seq_len", lineno));
    r.batch_size = static_cast<int>(require_unsigned(j, "batch_size", lineno));
    out.push_back(std::move(r));
  }
  return out;
}

void write_runs_jsonl(const std::string& path,
                      const std::vector<RunRecord>& records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write " + path);
  for (const RunRecord& r : records) {
    json j;
    j["domain"] = r.domain;
    j["n_params"] = r.n_params;
    j["dft_tokens"] = r.dft_tokens;
    j["p"] = r.p;
    j["min_val_ft_loss"] = r.min_val_ft_loss;
    j["pt_loss_at_min"] = r.pt_loss_at_min;
    j["steps_to_min"] = r.steps_to_min;
    j["seq_len"] = r.seq_len;
    j["batch_size"] = r.batch_size;
    out << j.dump() << "\n";
  }
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      cells.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  cells.push_back(cur);
  return cells;
}

double parse_double(const std::string& s, size_t line) {
  double v;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw ParseError("line " + std::to_string(line) + ": bad number '" + s + "'");
  return v;
}

uint64_t parse_u64(const std::string& s, size_t line) {
  uint64_t v;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw ParseError("line " + std::to_string(line) + ": bad integer '" + s + "'");
  return v;
}

} // namespace

LossCurve read_curve_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  std::string linebuf;
  if (!std::getline(in, linebuf)) throw ParseError(path + ": empty file");
  {
    auto cells = split_csv(linebuf);
    if (cells != std::vector<std::string>{"step", "train_ft", "val_ft", "val_pt"})
      throw ParseError(path + ": expected header step,train_ft,val_ft,val_pt");
  }
  LossCurve c;
  size_t lineno = 1;
  while (std::getline(in, linebuf)) {
    ++lineno;
    if (linebuf.empty()) continue;
    auto cells = split_csv(linebuf);
    if (cells.size() != 4)
      throw ParseError("line " + std::to_string(lineno) + ": expected 4 columns");
    c.steps.push_back(parse_u64(cells[0], lineno));
    if (!cells[1].empty()) c.train_ft.push_back(parse_double(cells[1], lineno));
    c.val_ft.push_back(parse_double(cells[2], lineno));
    if (!cells[3].empty()) c.val_pt.push_back(parse_double(cells[3], lineno));
  }
  if (!c.train_ft.empty() && c.train_ft.size() != c.steps.size())
    throw ParseError(path + ": train_ft column partially filled");
  if (!c.val_pt.empty() && c.val_pt.size() != c.steps.size())
    throw ParseError(path + ": val_pt column partially filled");
  if (c.val_ft.size() != c.steps.size())
    throw ParseError(path + ": val_ft column has gaps");
  return c;
}

void write_curve_csv(const std::string& path, const LossCurve& curve) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write " + path);
  out << "step,train_ft,val_ft,val_pt\n";
  for (size_t i = 0; i < curve.steps.size(); ++i) {
    out << curve.steps[i] << ",";
    if (curve.has_train_ft()) out << fmt_double(curve.train_ft[i]);
    out << "," << fmt_double(curve.val_ft[i]) << ",";
    if (curve.has_val_pt()) out << fmt_double(curve.val_pt[i]);
    out << "\n";
  }
}

L0Table read_l0_json(const std::string& path) {
  json j = json::parse(read_file(path), nullptr, false);
  if (j.is_discarded() || !j.is_object())
    throw ParseError(path + ": expected a JSON object of n_params -> loss");
  L0Table t;
  for (auto it = j.begin(); it != j.end(); ++it) {
    uint64_t n;
    const std::string& key = it.key();
    auto res = std::from_chars(key.data(), key.data() + key.size(), n);
    if (res.ec != std::errc() || res.ptr != key.data() + key.size())
      throw ParseError(path + ": key '" + key + "' is not an integer");
    if (!it.value().is_number())
      throw ParseError(path + ": value for '" + key + "' is not a number");
    t[n] = it.value().get<double>();
  }
  return t;
}

void write_l0_json(const std::string& path, const L0Table& table) {
  json j = json::object();
  for (const auto& [n, v] : table) j[std::to_string(n)] = v;
  write_file(path, j.dump(2) + "\n");
}

} // namespace scalelab::io
