#include "irsbeam/channel.hpp"

#include <cmath>
#include <stdexcept>

#include "irsbeam/rng.hpp"

namespace irsbeam {

namespace {

struct EntrySampler {
  ChannelModelParams::Kind kind;
  double los_weight = 0.0;     // sqrt(k/(k+1))
  double scatter_weight = 1.0; // sqrt(1/(k+1))

  explicit EntrySampler(const ChannelModelParams& model) : kind(model.kind) {
    if (kind == ChannelModelParams::Kind::Rician) {
      los_weight = std::sqrt(model.rician_k / (model.rician_k + 1.0));
      scatter_weight = std::sqrt(1.0 / (model.rician_k + 1.0));
    }
  }

  Complex draw(double gain, GaussianStream& stream) const {
    const double amp = std::sqrt(gain);
    switch (kind) {
      case ChannelModelParams::Kind::Los:
        return Complex(amp, 0.0);
      case ChannelModelParams::Kind::Rayleigh:
        return amp * stream.complex_normal();
      case ChannelModelParams::Kind::Rician:
        return amp * (Complex(los_weight, 0.0) + scatter_weight * stream.complex_normal());
    }
    return Complex(0.0, 0.0);
  }
};

}  // namespace

ChannelSet generate_channels(const SystemConfig& config,
                             const ChannelModelParams& model, uint64_t seed) {
  config.validate();
  model.validate();
  GaussianStream stream(seed);
  const EntrySampler sampler(model);

  ChannelSet channels;
  channels.bs_to_irs.resize(config.num_irs());
  for (int l = 0; l < config.num_irs(); ++l) {
    MatrixC& H = channels.bs_to_irs[l];
    H.resize(config.irs_sizes[l], config.num_bs_antennas);
    for (int n = 0; n < H.rows(); ++n)
      for (int m = 0; m < H.cols(); ++m)
        H(n, m) = sampler.draw(model.bs_irs_gain, stream);
  }

  channels.irs_to_mu.resize(config.num_irs());
  for (int l = 0; l < config.num_irs(); ++l) {
    channels.irs_to_mu[l].resize(config.num_mus);
    for (int i = 0; i < config.num_mus; ++i) {
      channels.irs_to_mu[l][i].resize(config.mu_antennas[i]);
      for (int q = 0; q < config.mu_antennas[i]; ++q) {
        RowVectorC& row = channels.irs_to_mu[l][i][q];
        row.resize(config.irs_sizes[l]);
        for (int n = 0; n < row.cols(); ++n)
          row[n] = sampler.draw(model.irs_mu_gain, stream);
      }
    }
  }

  channels.bs_to_mu.resize(config.num_mus);
  for (int i = 0; i < config.num_mus; ++i) {
    channels.bs_to_mu[i].resize(config.mu_antennas[i]);
    for (int q = 0; q < config.mu_antennas[i]; ++q) {
      RowVectorC& row = channels.bs_to_mu[i][q];
      row.resize(config.num_bs_antennas);
      for (int m = 0; m < row.cols(); ++m)
        row[m] = sampler.draw(model.bs_mu_gain, stream);
    }
  }
  return channels;
}

RowVectorC composite_channel(const ChannelSet& channels,
                             const PhaseProfile& phase, int mu, int antenna) {
  if (mu < 0 || mu >= channels.num_mus())
    throw std::out_of_range("composite_channel: mu index out of range");
  if (antenna < 0 || antenna >= channels.mu_antennas(mu))
    throw std::out_of_range("composite_channel: antenna index out of range");

  RowVectorC h = channels.bs_to_mu[mu][antenna];
  for (int l = 0; l < channels.num_irs(); ++l) {
    const VectorC coeff = phase.reflection_coefficients(l);
    // h_r^H * Phi * H applied without forming the diagonal matrix.
    const RowVectorC scaled =
        channels.irs_to_mu[l][mu][antenna].cwiseProduct(coeff.transpose());
    h += scaled * channels.bs_to_irs[l];
  }
  return h;
}

MatrixC effective_gram(const ChannelSet& channels, const PhaseProfile& phase,
                       int mu) {
  if (mu < 0 || mu >= channels.num_mus())
    throw std::out_of_range("effective_gram: mu index out of range");
  const int m = channels.num_bs_antennas();
  MatrixC gram = MatrixC::Zero(m, m);
  for (int q = 0; q < channels.mu_antennas(mu); ++q) {
    const RowVectorC row = composite_channel(channels, phase, mu, q);
    gram.noalias() += row.adjoint() * row;
  }
  return gram;
}

}  // namespace irsbeam
