#pragma once

#include "relight/image.hpp"

namespace relight {

/// 10*log10(1 / MSE) over all elements of [0,1] data; identical inputs give
/// +infinity.
double psnr(const ImageTensor& a, const ImageTensor& b);

/// Single-scale SSIM: 11x11 Gaussian window (sigma 1.5), C1=0.01^2,
/// C2=0.03^2 on unit range, weighted (non-sample) covariance, computed per
/// channel over valid window positions only, then averaged across channels.
double ssim(const ImageTensor& a, const ImageTensor& b);

} // namespace relight
