#include "mlkfhe/dataset_io.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "mlkfhe/text.hpp"

namespace mlkfhe {

namespace {

constexpr std::string_view kLabelPrefix = "label:";

std::string lower(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

bool starts_with_ci(std::string_view text, std::string_view prefix) {
  return text.size() >= prefix.size() && lower(text.substr(0, prefix.size())) == prefix;
}

bool is_missing(std::string_view value) {
  value = trim(value);
  return value.empty() || value == "?";
}

// Column description shared by both formats before encoding.
struct Column {
  std::string name;
  bool nominal = false;
  std::vector<std::string> categories;  // nominal only, declaration order
};

std::uint8_t parse_label_value(const std::string& source, std::size_t line, const Column& col,
                               std::string_view value) {
  const auto number = parse_double(value);
  if (!number || (*number != 0.0 && *number != 1.0)) {
    throw ParseError(source, line,
                     "label '" + col.name + "' has non-binary value '" + std::string(value) + "'");
  }
  return *number == 1.0 ? 1 : 0;
}

// Encodes raw string cells into a dataset given which columns are labels.
class Encoder {
 public:
  Encoder(std::string source, std::vector<Column> columns, std::vector<bool> is_label)
      : source_(std::move(source)), columns_(std::move(columns)), is_label_(std::move(is_label)) {
    for (std::size_t c = 0; c < columns_.size(); ++c) {
      if (is_label_[c]) {
        data_.label_names.push_back(columns_[c].name);
        continue;
      }
      offset_.push_back(data_.feature_info.size());
      if (columns_[c].nominal) {
        for (const auto& cat : columns_[c].categories) {
          data_.feature_info.push_back({columns_[c].name, FeatureKind::categorical, cat});
        }
      } else {
        data_.feature_info.push_back({columns_[c].name, FeatureKind::numeric, {}});
      }
    }
    if (data_.label_names.size() < 2) {
      throw ParseError(source_, 0,
                       "a multi-label dataset needs at least 2 labels, found " +
                           std::to_string(data_.label_names.size()));
    }
  }

  void add_row(std::size_t line, const std::vector<std::string>& cells) {
    if (cells.size() != columns_.size()) {
      throw ParseError(source_, line,
                       "expected " + std::to_string(columns_.size()) + " values, found " +
                           std::to_string(cells.size()));
    }
    std::vector<double> features(data_.feature_info.size(), 0.0);
    std::vector<std::uint8_t> labels;
    std::size_t feature_col = 0;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const Column& col = columns_[c];
      const std::string& cell = cells[c];
      if (is_missing(cell)) {
        throw ParseError(source_, line, "missing value for '" + col.name + "'");
      }
      if (is_label_[c]) {
        if (col.nominal && std::find(col.categories.begin(), col.categories.end(), cell) ==
                               col.categories.end()) {
          throw ParseError(source_, line,
                           "value '" + cell + "' is not declared for '" + col.name + "'");
        }
        labels.push_back(parse_label_value(source_, line, col, cell));
        continue;
      }
      const std::size_t base = offset_[feature_col++];
      if (col.nominal) {
        const auto it = std::find(col.categories.begin(), col.categories.end(), cell);
        if (it == col.categories.end()) {
          throw ParseError(source_, line,
                           "value '" + cell + "' is not declared for '" + col.name + "'");
        }
        features[base + static_cast<std::size_t>(it - col.categories.begin())] = 1.0;
      } else {
        const auto value = parse_double(cell);
        if (!value) {
          throw ParseError(source_, line,
                           "non-numeric value '" + cell + "' for '" + col.name + "'");
        }
        features[base] = *value;
      }
    }
    rows_.push_back(std::move(features));
    label_rows_.push_back(std::move(labels));
  }

  Dataset finish() && {
    if (rows_.empty()) throw ParseError(source_, 0, "no data rows");
    const auto n = static_cast<Eigen::Index>(rows_.size());
    data_.features.resize(n, static_cast<Eigen::Index>(data_.feature_info.size()));
    data_.labels.resize(n, static_cast<Eigen::Index>(data_.label_names.size()));
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto& f = rows_[static_cast<std::size_t>(i)];
      const auto& l = label_rows_[static_cast<std::size_t>(i)];
      for (Eigen::Index j = 0; j < data_.features.cols(); ++j) {
        data_.features(i, j) = f[static_cast<std::size_t>(j)];
      }
      for (Eigen::Index j = 0; j < data_.labels.cols(); ++j) {
        data_.labels(i, j) = l[static_cast<std::size_t>(j)];
      }
    }
    try {
      data_.validate();
    } catch (const std::invalid_argument& e) {
      throw ParseError(source_, 0, e.what());
    }
    return std::move(data_);
  }

 private:
  std::string source_;
  std::vector<Column> columns_;
  std::vector<bool> is_label_;
  std::vector<std::size_t> offset_;
  std::vector<std::vector<double>> rows_;
  std::vector<std::vector<std::uint8_t>> label_rows_;
  Dataset data_;
};

std::vector<bool> last_columns(std::size_t total, std::size_t q, const std::string& source) {
  if (q > total) {
    throw ParseError(source, 0,
                     "label count " + std::to_string(q) + " exceeds the " + std::to_string(total) +
                         " available columns");
  }
  std::vector<bool> out(total, false);
  for (std::size_t c = total - q; c < total; ++c) out[c] = true;
  return out;
}

// --- ARFF ----------------------------------------------------------------------

// Splits on `sep` outside single or double quotes and strips the quotes.
std::vector<std::string> split_arff(std::string_view text, char sep) {
  std::vector<std::string> out;
  std::string field;
  char quote = 0;
  bool any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quote) {
      if (c == '\\' && i + 1 < text.size()) {
        field += text[++i];
      } else if (c == quote) {
        quote = 0;
      } else {
        field += c;
      }
    } else if (c == '\'' || c == '"') {
      quote = c;
      any = true;
    } else if (c == sep) {
      out.emplace_back(any ? field : std::string(trim(field)));
      field.clear();
      any = false;
    } else if (!(any && (c == ' ' || c == '\t'))) {
      field += c;
    }
  }
  out.emplace_back(any ? field : std::string(trim(field)));
  return out;
}

// Reads a possibly quoted token from the front of `text`.
std::string take_token(std::string_view& text) {
  text = trim(text);
  std::string out;
  if (!text.empty() && (text.front() == '\'' || text.front() == '"')) {
    const char quote = text.front();
    std::size_t i = 1;
    for (; i < text.size() && text[i] != quote; ++i) {
      if (text[i] == '\\' && i + 1 < text.size()) ++i;
      out += text[i];
    }
    text.remove_prefix(std::min(text.size(), i + 1));
    return out;
  }
  std::size_t i = 0;
  while (i < text.size() && text[i] != ' ' && text[i] != '\t' && text[i] != '{') ++i;
  out = std::string(text.substr(0, i));
  text.remove_prefix(i);
  return out;
}

std::optional<long long> meka_label_option(std::string_view relation) {
  const auto pos = relation.find("-C");
  if (pos == std::string_view::npos) return std::nullopt;
  std::string_view rest = trim(relation.substr(pos + 2));
  std::size_t end = 0;
  while (end < rest.size() && (std::isdigit(static_cast<unsigned char>(rest[end])) ||
                               (end == 0 && rest[end] == '-'))) {
    ++end;
  }
  return parse_integer(rest.substr(0, end));
}

}  // namespace

ParseError::ParseError(const std::string& source, std::size_t line, const std::string& message)
    : std::runtime_error(line > 0 ? source + ":" + std::to_string(line) + ": " + message
                                  : source + ": " + message),
      line_(line) {}

Dataset parse_arff(std::istream& in, const LoadOptions& options, const std::string& source) {
  std::vector<Column> columns;
  std::string relation;
  std::string raw;
  std::size_t line = 0;
  bool in_data = false;
  std::optional<Encoder> encoder;

  while (std::getline(in, raw)) {
    ++line;
    std::string_view text = trim(raw);
    if (text.empty() || text.front() == '%') continue;

    if (!in_data) {
      if (starts_with_ci(text, "@relation")) {
        std::string_view rest = text.substr(9);
        relation = take_token(rest);
      } else if (starts_with_ci(text, "@attribute")) {
        std::string_view rest = text.substr(10);
        Column col;
        col.name = take_token(rest);
        if (col.name.empty()) throw ParseError(source, line, "attribute without a name");
        rest = trim(rest);
        if (!rest.empty() && rest.front() == '{') {
          const auto close = rest.rfind('}');
          if (close == std::string_view::npos) {
            throw ParseError(source, line, "unterminated nominal specification");
          }
          col.nominal = true;
          col.categories = split_arff(rest.substr(1, close - 1), ',');
          if (col.categories.empty() || (col.categories.size() == 1 && col.categories[0].empty())) {
            throw ParseError(source, line, "nominal attribute '" + col.name + "' has no values");
          }
        } else {
          const std::string type = lower(take_token(rest));
          if (type != "numeric" && type != "real" && type != "integer") {
            throw ParseError(source, line,
                             "unsupported attribute type '" + type + "' for '" + col.name + "'");
          }
        }
        columns.push_back(std::move(col));
      } else if (starts_with_ci(text, "@data")) {
        if (columns.empty()) throw ParseError(source, line, "@data before any @attribute");
        std::vector<bool> is_label;
        if (options.label_count) {
          is_label = last_columns(columns.size(), *options.label_count, source);
        } else if (const auto c = meka_label_option(relation)) {
          const auto q = static_cast<std::size_t>(std::llabs(*c));
          if (*c >= 0) {
            if (q > columns.size()) throw ParseError(source, line, "-C exceeds attribute count");
            is_label.assign(columns.size(), false);
            for (std::size_t j = 0; j < q; ++j) is_label[j] = true;
          } else {
            is_label = last_columns(columns.size(), q, source);
          }
        } else {
          throw ParseError(source, line,
                           "label count unknown: pass a label count or use a '-C q' relation");
        }
        encoder.emplace(source, columns, std::move(is_label));
        in_data = true;
      } else {
        throw ParseError(source, line, "unexpected header line '" + std::string(text) + "'");
      }
      continue;
    }

    std::vector<std::string> cells;
    if (text.front() == '{') {
      const auto close = text.rfind('}');
      if (close == std::string_view::npos) throw ParseError(source, line, "unterminated sparse row");
      cells.resize(columns.size());
      for (std::size_t c = 0; c < columns.size(); ++c) {
        cells[c] = columns[c].nominal ? columns[c].categories.front() : "0";
      }
      std::string_view body = trim(text.substr(1, close - 1));
      if (!body.empty()) {
        for (const auto& entry : split_arff(body, ',')) {
          std::string_view e = trim(entry);
          const auto space = e.find_first_of(" \t");
          if (space == std::string_view::npos) {
            throw ParseError(source, line, "malformed sparse entry '" + std::string(e) + "'");
          }
          const auto index = parse_integer(e.substr(0, space));
          if (!index || *index < 0 || static_cast<std::size_t>(*index) >= columns.size()) {
            throw ParseError(source, line, "bad sparse index in '" + std::string(e) + "'");
          }
          cells[static_cast<std::size_t>(*index)] = std::string(trim(e.substr(space)));
        }
      }
    } else {
      cells = split_arff(text, ',');
    }
    encoder->add_row(line, cells);
  }
  if (!encoder) throw ParseError(source, line, "no @data section");
  return std::move(*encoder).finish();
}

Dataset parse_csv(std::istream& in, const LoadOptions& options, const std::string& source) {
  std::string raw;
  std::size_t line = 0;
  std::vector<std::string> header;
  std::vector<std::pair<std::size_t, std::vector<std::string>>> rows;

  while (std::getline(in, raw)) {
    ++line;
    const std::string_view text = trim(raw);
    if (text.empty() || text.front() == '#') continue;
    auto fields = split_csv_record(text);
    if (!fields) throw ParseError(source, line, "unterminated quoted field");
    if (header.empty()) {
      header = std::move(*fields);
      continue;
    }
    if (fields->size() != header.size()) {
      throw ParseError(source, line,
                       "expected " + std::to_string(header.size()) + " fields, found " +
                           std::to_string(fields->size()));
    }
    rows.emplace_back(line, std::move(*fields));
  }
  if (header.empty()) throw ParseError(source, 0, "missing header row");

  std::vector<bool> is_label(header.size(), false);
  if (options.label_count) {
    is_label = last_columns(header.size(), *options.label_count, source);
  } else {
    for (std::size_t c = 0; c < header.size(); ++c) {
      is_label[c] = header[c].starts_with(kLabelPrefix);
    }
  }

  std::vector<Column> columns(header.size());
  for (std::size_t c = 0; c < header.size(); ++c) {
    Column& col = columns[c];
    col.name = header[c];
    if (col.name.starts_with(kLabelPrefix)) col.name.erase(0, kLabelPrefix.size());
    if (is_label[c]) continue;
    std::set<std::string> categories;
    for (const auto& [row_line, fields] : rows) {
      const std::string& cell = fields[c];
      if (is_missing(cell)) {
        throw ParseError(source, row_line, "missing value for '" + col.name + "'");
      }
      if (!parse_double(cell)) categories.insert(cell);
    }
    if (!categories.empty()) {
      // Any non-numeric cell makes the whole column categorical.
      for (const auto& [row_line, fields] : rows) categories.insert(fields[c]);
      col.nominal = true;
      col.categories.assign(categories.begin(), categories.end());
    }
  }

  Encoder encoder(source, std::move(columns), std::move(is_label));
  for (const auto& [row_line, fields] : rows) encoder.add_row(row_line, fields);
  return std::move(encoder).finish();
}

Dataset load_dataset(const std::filesystem::path& path, const LoadOptions& options) {
  DatasetFormat format = options.format;
  if (format == DatasetFormat::automatic) {
    const std::string ext = lower(path.extension().string());
    if (ext == ".arff") {
      format = DatasetFormat::arff;
    } else if (ext == ".csv") {
      format = DatasetFormat::csv;
    } else {
      throw ParseError(path.string(), 0, "cannot infer the format from the extension");
    }
  }
  std::ifstream in(path);
  if (!in) throw ParseError(path.string(), 0, "cannot open file");
  return format == DatasetFormat::arff ? parse_arff(in, options, path.string())
                                       : parse_csv(in, options, path.string());
}

void save_csv(const Dataset& data, std::ostream& out) {
  data.validate();
  std::vector<std::string> header;
  for (const auto& info : data.feature_info) {
    header.push_back(info.kind == FeatureKind::categorical ? info.source + "=" + info.category
                                                           : info.source);
  }
  for (const auto& name : data.label_names) header.push_back(std::string(kLabelPrefix) + name);
  out << join_csv(header) << '\n';
  for (std::size_t i = 0; i < data.size(); ++i) {
    std::string line;
    for (double v : data.row(i)) {
      line += format_double(v);
      line += ',';
    }
    const auto labels = data.label_row(i);
    for (std::size_t j = 0; j < labels.size(); ++j) {
      line += labels[j] ? '1' : '0';
      if (j + 1 < labels.size()) line += ',';
    }
    out << line << '\n';
  }
}

void save_csv(const Dataset& data, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  save_csv(data, out);
}

}  // namespace mlkfhe
