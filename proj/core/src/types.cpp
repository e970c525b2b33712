#include "scalelab/types.hpp"

#include <cmath>
#include <map>
#include <tuple>

namespace scalelab {

ValidationResult validate_dataset(const std::vector<RunRecord>& records,
                                  const L0Table* l0) {
  ValidationResult out;
  if (records.empty()) {
    out.errors.push_back("dataset is empty");
    return out;
  }

  const std::string& domain = records.front().domain;
  std::map<std::tuple<uint64_t, uint64_t, double>, size_t> seen;

  for (size_t i = 0; i < records.size(); ++i) {
    const RunRecord& r = records[i];
    std::string where = "record " + std::to_string(i);
    if (r.domain != domain)
      out.errors.push_back(where + ": domain '" + r.domain +
                           "' differs from '" + domain + "'");
    if (r.n_params == 0) out.errors.push_back(where + ": n_params is zero");
    if (r.dft_tokens == 0) out.errors.push_back(where + ": dft_tokens is zero");
    if (!(r.p >= 0.0 && r.p <= 1.0))
      out.errors.push_back(where + ": p outside [0, 1]");
    if (!(r.min_val_ft_loss > 0.0) || !std::isfinite(r.min_val_ft_loss))
      out.errors.push_back(where + ": min_val_ft_loss not positive");
    if (!(r.pt_loss_at_min > 0.0) || !std::isfinite(r.pt_loss_at_min))
      out.errors.push_back(where + ": pt_loss_at_min not positive");
    if (r.seq_len <= 0) out.errors.push_back(where + ": seq_len not positive");
    if (r.batch_size <= 0)
      out.errors.push_back(where + ": batch_size not positive");

    auto key = std::make_tuple(r.n_params, r.dft_tokens, r.p);
    auto [it, inserted] = seen.emplace(key, i);
    if (!inserted)
      out.errors.push_back(where + ": duplicate (n_params, dft_tokens, p) of record " +
                           std::to_string(it->second));

    if (l0 && r.p < 1.0) {
      auto base = l0->find(r.n_params);
      if (base != l0->end() && r.pt_loss_at_min < base->second)
        out.warnings.push_back(where + ": pt_loss_at_min " +
                               std::to_string(r.pt_loss_at_min) +
                               " below rewarmed baseline " +
                               std::to_string(base->second));
    }
  }

  if (out.errors.empty()) {
    FitDataset ds;
    ds.domain = domain;
    ds.records = records;
    out.dataset = std::move(ds);
  }
  return out;
}

} // namespace scalelab
