#include "rvms/polarity.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace rvms {

namespace {

double median(std::vector<double> values) {
    if (values.empty()) throw std::invalid_argument("median of empty set");
    std::sort(values.begin(), values.end());
    const size_t n = values.size();
    return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

int sign_of(double x) {
    return (x > 0.0) - (x < 0.0);
}

} // namespace

GrayImage box_blur(const GrayImage& img, int radius) {
    validate(img);
    if (radius < 1) throw std::invalid_argument("box_blur: radius must be >= 1");

    const int w = img.width, h = img.height;
    // Integral image with a zero top row and left column.
    std::vector<double> integral(static_cast<size_t>(w + 1) * (h + 1), 0.0);
    for (int y = 0; y < h; ++y) {
        double row_sum = 0.0;
        for (int x = 0; x < w; ++x) {
            row_sum += img.at(y, x);
            integral[static_cast<size_t>(y + 1) * (w + 1) + x + 1] =
                integral[static_cast<size_t>(y) * (w + 1) + x + 1] + row_sum;
        }
    }
    auto window_sum = [&](int y0, int x0, int y1, int x1) { // inclusive bounds
        return integral[static_cast<size_t>(y1 + 1) * (w + 1) + x1 + 1] -
               integral[static_cast<size_t>(y0) * (w + 1) + x1 + 1] -
               integral[static_cast<size_t>(y1 + 1) * (w + 1) + x0] +
               integral[static_cast<size_t>(y0) * (w + 1) + x0];
    };

    GrayImage out(w, h);
    for (int y = 0; y < h; ++y) {
        const int y0 = std::max(0, y - radius), y1 = std::min(h - 1, y + radius);
        for (int x = 0; x < w; ++x) {
            const int x0 = std::max(0, x - radius), x1 = std::min(w - 1, x + radius);
            const double count = static_cast<double>(y1 - y0 + 1) * (x1 - x0 + 1);
            out.at(y, x) = static_cast<float>(window_sum(y0, x0, y1, x1) / count);
        }
    }
    return out;
}

PolarityScore polarity_score(const GrayImage& img, int blur_radius, double top_frac) {
    validate(img);
    if (img.width < 3 * blur_radius || img.height < 3 * blur_radius)
        throw std::invalid_argument("polarity_score: image smaller than 3x blur_radius");
    if (!(top_frac > 0.0 && top_frac <= 1.0))
        throw std::invalid_argument("polarity_score: top_frac must be in (0, 1]");

    const GrayImage blurred = box_blur(img, blur_radius);
    const size_t n = img.pixel_count();
    std::vector<double> residual(n);
    double max_abs = 0.0;
    for (size_t i = 0; i < n; ++i) {
        residual[i] = static_cast<double>(img.data[i]) - blurred.data[i];
        max_abs = std::max(max_abs, std::fabs(residual[i]));
    }
    if (max_abs == 0.0)
        throw std::invalid_argument("polarity_score: degenerate input (constant image)");

    const size_t k = std::max<size_t>(
        1, static_cast<size_t>(std::ceil(top_frac * static_cast<double>(n))));
    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), size_t{0});
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        const double fa = std::fabs(residual[a]), fb = std::fabs(residual[b]);
        return fa != fb ? fa > fb : a < b;
    });

    double sum = 0.0;
    for (size_t i = 0; i < k; ++i) sum += residual[order[i]];

    return {sum / static_cast<double>(k), static_cast<int>(k)};
}

std::vector<std::pair<std::string, DomainLabel>> classify_domains(
    const std::vector<GrayImage>& source,
    const std::vector<std::pair<std::string, std::vector<GrayImage>>>& targets) {
    if (source.empty()) throw std::invalid_argument("classify_domains: empty source domain");

    std::vector<double> source_scores;
    source_scores.reserve(source.size());
    for (const auto& img : source) source_scores.push_back(polarity_score(img).value);
    const int source_sign = sign_of(median(std::move(source_scores)));

    std::vector<std::pair<std::string, DomainLabel>> out;
    out.reserve(targets.size());
    for (const auto& [domain_id, images] : targets) {
        if (images.empty())
            throw std::invalid_argument("classify_domains: empty target domain " + domain_id);
        std::vector<double> scores;
        scores.reserve(images.size());
        for (const auto& img : images) scores.push_back(polarity_score(img).value);
        const double med = median(std::move(scores));
        const int sign = sign_of(med);

        DomainLabel label;
        label.median_score = med;
        label.label = (sign != 0 && sign == source_sign) ? DomainLabel::Kind::similar
                                                         : DomainLabel::Kind::dissimilar;
        out.emplace_back(domain_id, label);
    }
    return out;
}

} // namespace rvms
