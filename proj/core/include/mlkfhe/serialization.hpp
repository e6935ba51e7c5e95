#pragma once

// Versioned plain-text model container. Doubles are written in shortest
// round-trip form, so a reloaded model predicts bit-identically. Random
// feature maps are stored by seed and regenerated on load.

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "mlkfhe/algorithm.hpp"

namespace mlkfhe {

inline constexpr int kModelFormatVersion = 1;

class SerializationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// `header` lines are written first as "# ..." comments.
void save_model(const TrainedAlgorithm& model, std::ostream& out,
                const std::vector<std::string>& header = {});
void save_model(const TrainedAlgorithm& model, const std::filesystem::path& path,
                const std::vector<std::string>& header = {});

TrainedAlgorithm load_model(std::istream& in);
TrainedAlgorithm load_model(const std::filesystem::path& path);

/// Percent-encoding that keeps tokens free of whitespace.
std::string escape_token(std::string_view text);
std::string unescape_token(std::string_view token);

}  // namespace mlkfhe
