#include "scalelab/presets.hpp"

#include <array>

namespace scalelab::presets {

namespace {

const std::array<ModelSpec, 5> kModels = {{
    {"Tiny", 41000000, 512, 8, 8, 32, 1e-3, 5100000000ull, 3.13, 3.19},
    {"Small", 109000000, 768, 12, 12, 32, 1e-3, 12000000000ull, 2.84, 2.92},
    {"Medium", 334000000, 1024, 16, 24, 64, 1e-3, 33000000000ull, 2.55, 2.60},
    {"Large", 665000000, 1536, 16, 24, 128, 3e-4, 66000000000ull, 2.34, 2.39},
    {"XL", 1270000000, 2048, 16, 24, 112, 3e-4, 100000000000ull, 2.22, 2.27},
}};

laws::LawParams ft_params(double alpha, double beta, double A, double E) {
  laws::LawParams q;
  q.A = A;
  q.E = E;
  q.alpha = alpha;
  q.beta = beta;
  return q;
}

laws::LawParams fg_params(double alpha, double beta, double A, double B) {
  laws::LawParams q;
  q.A = A;
  q.B = B;
  q.alpha = alpha;
  q.beta = beta;
  return q;
}

const std::array<DomainPreset, 12> kDomains = {{
    {"arxiv", ft_params(0.17, 0.10, 95.18, 1.30), fg_params(0.74, 0.34, 526, 392)},
    {"dm_mathematics", ft_params(0.06, 0.19, 16.03, 0.88), fg_params(0.58, 0.27, 202, 9847)},
    {"enron_emails", ft_params(0.07, 0.05, 20.21, 0.00), fg_params(0.53, 0.21, 127, 1754)},
    {"github", ft_params(0.14, 0.12, 84.55, 0.79), fg_params(0.76, 0.43, 217, 647)},
    {"pg19", ft_params(0.14, 0.02, 34.55, 1.25), fg_params(0.78, 0.60, 14, 259)},
    {"wikipedia_en", ft_params(0.13, 0.02, 30.11, 0.62), fg_params(0.52, 0.11, 145, 829)},
    {"europarl", ft_params(0.12, 0.17, 160.24, 1.10), fg_params(0.81, 0.39, 2511, 1107)},
    {"freelaw", ft_params(0.19, 0.05, 94.06, 1.11), fg_params(0.75, 0.45, 74, 236)},
    {"openwebtext2", ft_params(0.14, 0.01, 31.54, 0.96), fg_params(0.38, 0.23, 2, 6504)},
    {"pubmed_abstracts", ft_params(0.17, 0.01, 46.89, 0.94), fg_params(0.76, 0.57, 8, 948)},
    {"pubmed_central", ft_params(0.18, 0.05, 74.37, 1.09), fg_params(0.65, 0.34, 81, 574)},
    {"stackexchange", ft_params(0.16, 0.08, 78.23, 1.27), fg_params(0.62, 0.34, 63, 1179)},
}};

const DomainPreset kIft = {"openhermes", ft_params(0.17, 0.03, 64.28, 0.46),
                           fg_params(0.80, 0.27, 5513, 8584)};

const std::array<uint64_t, 5> kTokenGrid = {300000, 900000, 3000000, 9000000,
                                            30000000};
const std::array<double, 5> kPGrid = {0, 0.001, 0.005, 0.01, 0.05};

} // namespace

std::span<const ModelSpec> builtin_models() { return kModels; }

const ModelSpec* find_model(std::string_view name) {
  for (const ModelSpec& m : kModels)
    if (m.name == name) return &m;
  return nullptr;
}

const ModelSpec* find_model_by_params(uint64_t n_params) {
  for (const ModelSpec& m : kModels)
    if (m.n_params == n_params) return &m;
  return nullptr;
}

const L0Table& builtin_l0_table() {
  static const L0Table table = [] {
    L0Table t;
    for (const ModelSpec& m : kModels) t[m.n_params] = m.pt_loss_rewarmed;
    return t;
  }();
  return table;
}

std::span<const DomainPreset> builtin_domains() { return kDomains; }

const DomainPreset* find_domain(std::string_view name) {
  for (const DomainPreset& d : kDomains)
    if (d.name == name) return &d;
  return nullptr;
}

const DomainPreset& ift_preset() { return kIft; }

std::span<const uint64_t> builtin_token_grid() { return kTokenGrid; }

std::span<const double> builtin_p_grid() { return kPGrid; }

} // namespace scalelab::presets
