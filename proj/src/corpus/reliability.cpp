#include <cmath>

#include "bcsmile/corpus/corpus.hpp"
#include "bcsmile/error.hpp"

namespace bcsmile::corpus {

double default_max_duration(const std::vector<SmileAnnotation>& annotations) {
  if (annotations.empty()) return 0.0;
  double mean = 0.0;
  for (const auto& a : annotations) mean += a.duration();
  mean /= static_cast<double>(annotations.size());
  double var = 0.0;
  for (const auto& a : annotations) var += (a.duration() - mean) * (a.duration() - mean);
  var /= static_cast<double>(annotations.size());
  return mean + 4.0 * std::sqrt(var);
}

std::vector<SmileAnnotation> filter_reliable_smiles(
    const std::vector<SmileAnnotation>& annotations,
    const std::map<AnnotationKey, std::optional<Intensity>>& predicted_intensity, double max_duration) {
  std::vector<SmileAnnotation> kept;
  for (const auto& a : annotations) {
    auto it = predicted_intensity.find(key_of(a));
    if (it == predicted_intensity.end()) {
      throw Error("no predicted intensity for smile at " + std::to_string(a.onset) + " s (dyad '" + a.dyad_id +
                  "', " + std::string(to_string(a.listener_side)) + " listener)");
    }
    if (!it->second) continue;
    if (a.duration() > max_duration) continue;
    SmileAnnotation k = a;
    k.intensity = it->second;
    kept.push_back(std::move(k));
  }
  return kept;
}

}  // namespace bcsmile::corpus
