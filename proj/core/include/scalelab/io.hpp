#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "scalelab/types.hpp"

namespace scalelab::io {

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Shortest decimal string that round-trips the value.
std::string fmt_double(double v);

std::vector<RunRecord> read_runs_jsonl(const std::string& path);
void write_runs_jsonl(const std::string& path,
                      const std::vector<RunRecord>& records);

// Columns: step,train_ft,val_ft,val_pt. train_ft and val_pt may be empty.
LossCurve read_curve_csv(const std::string& path);
void write_curve_csv(const std::string& path, const LossCurve& curve);

L0Table read_l0_json(const std::string& path);
void write_l0_json(const std::string& path, const L0Table& table);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

} // namespace scalelab::io
