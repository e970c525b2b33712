#pragma once

#include <span>
#include <string_view>

#include "scalelab/laws.hpp"
#include "scalelab/types.hpp"

namespace scalelab::presets {

constexpr int kVocabSize = 32000;
constexpr int kSeqLen = 1024;

// Published coefficient sets for one finetuning domain: a saturating
// power law for the finetuning loss and an anchored law for the
// pretraining loss rise.
struct DomainPreset {
  std::string_view name;
  laws::LawParams ft; // multiplicative_ft
  laws::LawParams fg; // forgetting_mult, baseline resolved per model
};

std::span<const ModelSpec> builtin_models();
const ModelSpec* find_model(std::string_view name);
const ModelSpec* find_model_by_params(uint64_t n_params);

// Rewarmed pretraining losses keyed by n_params.
const L0Table& builtin_l0_table();

std::span<const DomainPreset> builtin_domains();
const DomainPreset* find_domain(std::string_view name);

// Instruction-tuning dataset fit, same parameterization.
const DomainPreset& ift_preset();

std::span<const uint64_t> builtin_token_grid();
std::span<const double> builtin_p_grid();

} // namespace scalelab::presets
