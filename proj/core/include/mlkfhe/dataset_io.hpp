#pragma once

// Dataset files: the attribute-relation (ARFF) text format, dense or sparse,
// and CSV with a header row.
//
// Label columns are either the last q attributes/columns (when a label count
// is supplied), a MEKA-style "-C q" option in the ARFF relation name, or CSV
// columns whose header starts with "label:". Nominal features are one-hot
// encoded; missing values are rejected.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>

#include "mlkfhe/dataset.hpp"

namespace mlkfhe {

enum class DatasetFormat { automatic, arff, csv };

struct LoadOptions {
  DatasetFormat format = DatasetFormat::automatic;  // by file extension
  std::optional<std::size_t> label_count;
};

/// Raised for malformed input; what() reads "<source>:<line>: <message>".
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& message);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Loads a dataset with at least two labels.
Dataset load_dataset(const std::filesystem::path& path, const LoadOptions& options = {});

Dataset parse_arff(std::istream& in, const LoadOptions& options,
                   const std::string& source = "<arff>");
Dataset parse_csv(std::istream& in, const LoadOptions& options,
                  const std::string& source = "<csv>");

/// Writes features as numeric columns and labels as "label:<name>" columns;
/// loading the result reproduces both matrices exactly.
void save_csv(const Dataset& data, std::ostream& out);
void save_csv(const Dataset& data, const std::filesystem::path& path);

}  // namespace mlkfhe
