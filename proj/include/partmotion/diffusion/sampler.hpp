#pragma once

#include <cstdint>
#include <functional>

#include "partmotion/diffusion/denoiser.hpp"
#include "partmotion/diffusion/schedule.hpp"

namespace partmotion::diffusion {

// Returns x̂_0 given x_σ and σ.
using Predictor = std::function<nn::Mat(const nn::Mat& noisy, int sigma)>;

// Ancestral DDPM sampling in the sample-prediction parameterization. Starts
// from x_S ~ N(0, I); the final step returns x̂_0 without added noise.
// Throws Error(kNonfiniteSample) if any intermediate value is not finite.
nn::Mat ddpmSample(const Predictor& predict, const NoiseSchedule& schedule, std::size_t frames, std::size_t dim,
                   std::uint64_t seed);

nn::Mat ddpmSample(const Denoiser& model, const NoiseSchedule& schedule, const conditioning::ConditionGrid& grid,
                   std::uint64_t seed);

}  // namespace partmotion::diffusion
