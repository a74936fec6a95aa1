#pragma once

#include <cstdint>

#include "irsbeam/types.hpp"

namespace irsbeam {

/// Draws a full channel set from the model. Deterministic in
/// (config, model, seed). Fill order of the single stream: bs_to_irs per IRS
/// row-major, then irs_to_mu by (l, i, q) left to right, then bs_to_mu by
/// (i, q).
ChannelSet generate_channels(const SystemConfig& config,
                             const ChannelModelParams& model, uint64_t seed);

/// Effective downlink row channel to antenna q of MU i:
/// direct term plus the reflected term of every IRS.
RowVectorC composite_channel(const ChannelSet& channels,
                             const PhaseProfile& phase, int mu, int antenna);

/// Sum of outer products of the composite channels over the antennas of
/// MU i. Hermitian PSD with rank at most Q_i.
MatrixC effective_gram(const ChannelSet& channels, const PhaseProfile& phase,
                       int mu);

}  // namespace irsbeam
