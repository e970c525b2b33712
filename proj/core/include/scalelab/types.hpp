#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace scalelab {

struct ModelSpec {
  std::string name;
  uint64_t n_params = 0;
  int hidden_dim = 0;
  int n_heads = 0;
  int n_layers = 0;
  int batch_size = 0;
  double init_lr = 0;
  uint64_t pretrain_tokens = 0;
  double pt_loss_terminal = 0; // end of pretraining, low LR
  double pt_loss_rewarmed = 0; // after LR rewarmup, finetuning start point
};

// One finetuning run reduced to its summary statistics.
struct RunRecord {
  std::string domain;
  uint64_t n_params = 0;
  uint64_t dft_tokens = 0;
  double p = 0; // injected pretraining-data fraction
  double min_val_ft_loss = 0;
  double pt_loss_at_min = 0;
  uint64_t steps_to_min = 0;
  int seq_len = 0;
  int batch_size = 0;
};

struct FitDataset {
  std::string domain;
  std::vector<RunRecord> records;
};

// Step-indexed loss series. train_ft and val_pt are optional columns:
// either empty or the same length as steps.
struct LossCurve {
  std::string run_id;
  std::vector<uint64_t> steps;
  std::vector<double> train_ft;
  std::vector<double> val_ft;
  std::vector<double> val_pt;

  bool has_train_ft() const { return !train_ft.empty(); }
  bool has_val_pt() const { return !val_pt.empty(); }
};

// Rewarmed pretraining loss per model size, the anchor for forgetting laws.
using L0Table = std::map<uint64_t, double>;

struct ValidationResult {
  std::optional<FitDataset> dataset; // set only when there are no errors
  std::vector<std::string> errors;
  std::vector<std::string> warnings;
};

// Checks records for mixed domains, duplicate (n_params, dft_tokens, p)
// triples, nonpositive losses or token counts, and p outside [0, 1].
// Warns (does not reject) when pt_loss_at_min is below the rewarmed
// baseline for that model size, which the anchored laws cannot produce.
ValidationResult validate_dataset(const std::vector<RunRecord>& records,
                                  const L0Table* l0 = nullptr);

} // namespace scalelab
