#include "hsc/demand.hpp"

#include <cmath>
#include <stdexcept>

namespace hsc {

namespace {

double round_and_clip(double value, const DemandParams& params) {
  const double rounded = std::nearbyint(value);
  if (rounded < params.clip_low) return params.clip_low;
  if (rounded > params.clip_high) return params.clip_high;
  return rounded;
}

}  // namespace

std::string to_string(DemandModel model) {
  switch (model) {
    case DemandModel::kGbm: return "gbm";
    case DemandModel::kPoisson: return "poisson";
    case DemandModel::kMerton: return "merton";
  }
  throw std::invalid_argument("unknown demand model enum");
}

DemandModel demand_model_from_string(const std::string& name) {
  if (name == "gbm") return DemandModel::kGbm;
  if (name == "poisson") return DemandModel::kPoisson;
  if (name == "merton") return DemandModel::kMerton;
  throw std::invalid_argument("unknown demand model: " + name);
}

void DemandParams::validate() const {
  if (sigma < 0 || shock_std < 0 || jump_std < 0 || poisson_rate < 0 ||
      jump_intensity < 0) {
    throw std::invalid_argument("demand: dispersion/rate parameters must be >= 0");
  }
  if (init_low > init_high) {
    throw std::invalid_argument("demand: init_low > init_high");
  }
  if (clip_low > clip_high) {
    throw std::invalid_argument("demand: clip_low > clip_high");
  }
  if (clip_low > init_low) {
    throw std::invalid_argument("demand: clip_low must not exceed init_low");
  }
}

std::vector<double> init_demand(const DemandParams& params, std::size_t n_points,
                                RandomStream& rng) {
  if (n_points == 0) {
    throw std::invalid_argument("init_demand: n_points must be >= 1");
  }
  std::vector<double> out(n_points);
  for (std::size_t p = 0; p < n_points; ++p) {
    const double draw =
        params.init_low + (params.init_high - params.init_low) * rng.uniform();
    out[p] = round_and_clip(draw, params);
  }
  return out;
}

double step_gbm(double prev, const DemandParams& params, RandomStream& rng) {
  const double z = rng.normal();
  const double shock = params.shock_std > 0 ? rng.normal(0.0, params.shock_std) : 0.0;
  const double exponent =
      (params.mu - 0.5 * params.sigma * params.sigma) + params.sigma * z + shock;
  return round_and_clip(prev * std::exp(exponent), params);
}

double step_poisson(double prev, const DemandParams& params, RandomStream& rng) {
  const double increment = static_cast<double>(rng.poisson(params.poisson_rate));
  return round_and_clip(prev + increment, params);
}

double step_merton(double prev, const DemandParams& params, RandomStream& rng,
                   bool* jump_occurred) {
  const double eps = rng.normal();
  const bool jumped = rng.poisson(params.jump_intensity) > 0;
  const double jump = jumped ? rng.normal(params.jump_mean, params.jump_std) : 0.0;
  if (jump_occurred != nullptr) *jump_occurred = jumped;
  const double exponent =
      (params.mu - 0.5 * params.sigma * params.sigma) + params.sigma * eps + jump;
  return round_and_clip(prev * std::exp(exponent), params);
}

DemandSeries generate_series(const DemandParams& params, std::size_t T,
                             std::size_t n_points) {
  params.validate();
  if (T == 0) throw std::invalid_argument("generate_series: T must be >= 1");
  if (n_points == 0) {
    throw std::invalid_argument("generate_series: n_points must be >= 1");
  }

  DemandSeries series;
  series.params = params;
  series.values = Matrix(T, n_points);

  const RandomStream root(params.seed);
  for (std::size_t p = 0; p < n_points; ++p) {
    RandomStream stream = root.substream(p);
    series.values(0, p) = init_demand(params, 1, stream)[0];
    for (std::size_t t = 1; t < T; ++t) {
      const double prev = series.values(t - 1, p);
      switch (params.model) {
        case DemandModel::kGbm:
          series.values(t, p) = step_gbm(prev, params, stream);
          break;
        case DemandModel::kPoisson:
          series.values(t, p) = step_poisson(prev, params, stream);
          break;
        case DemandModel::kMerton:
          series.values(t, p) = step_merton(prev, params, stream);
          break;
        default:
          throw std::invalid_argument("generate_series: unknown demand model");
      }
    }
  }
  return series;
}

}  // namespace hsc
