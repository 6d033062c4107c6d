#include "boostkit/model_io.hpp"

#include <cctype>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>

#include "boostkit/detail/text.hpp"
#include "boostkit/error.hpp"

namespace boostkit {

namespace {

using detail::format_double;

constexpr const char* kMagic = "boostkit-model";

// Config values may hold paths; whitespace and '%' are written as %XX.
std::string encode_value(const std::string& value) {
  static const char* hex = "0123456789ABCDEF";
  std::string out;
  for (const char c : value) {
    const auto u = static_cast<unsigned char>(c);
    if (u <= 0x20 || c == '%' || u == 0x7F) {
      out += '%';
      out += hex[u >> 4];
      out += hex[u & 0xF];
    } else {
      out += c;
    }
  }
  return out;
}

std::optional<std::string> decode_value(const std::string& text) {
  std::string out;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] != '%') {
      out += text[i];
      continue;
    }
    if (i + 2 >= text.size() || !std::isxdigit(static_cast<unsigned char>(text[i + 1])) ||
        !std::isxdigit(static_cast<unsigned char>(text[i + 2]))) {
      return std::nullopt;
    }
    out += static_cast<char>(std::stoi(text.substr(i + 1, 2), nullptr, 16));
    i += 2;
  }
  return out;
}

void write_terms(const AdditiveModel& model, std::ostream& out) {
  out << "terms " << model.size() << '\n';
  std::size_t round = 1;
  for (const auto& term : model.terms()) {
    out << "term " << round++ << ' ' << format_double(term.alpha) << ' ' << term.stump.feature << ' '
        << format_double(term.stump.threshold) << ' ' << format_double(term.stump.left) << ' '
        << format_double(term.stump.right) << '\n';
  }
}

void write_header(std::ostream& out, const char* mode, LossKind loss, Link link, std::size_t dimension,
                  const Provenance& provenance) {
  out << kMagic << '\n';
  out << "format_version " << kModelFormatVersion << '\n';
  out << "mode " << mode << '\n';
  out << "loss " << to_string(loss) << '\n';
  out << "link " << to_string(link) << '\n';
  out << "dimension " << dimension << '\n';
  out << "seed " << provenance.seed << '\n';
  out << "config";
  for (const auto& [key, value] : provenance.config) {
    out << ' ' << key << '=' << encode_value(value);
  }
  out << '\n';
}

// Token reader over whitespace-separated lines with positioned errors.
class Reader {
public:
  Reader(std::istream& in, std::string source) : in_(in), source_(std::move(source)) {}

  std::vector<std::string> line(const std::string& expected_keyword) {
    std::string text;
    while (std::getline(in_, text)) {
      ++line_number_;
      if (!detail::trim(text).empty()) {
        std::istringstream fields(text);
        std::vector<std::string> tokens;
        for (std::string token; fields >> token;) {
          tokens.push_back(token);
        }
        if (tokens.front() != expected_keyword) {
          throw error("expected '" + expected_keyword + "', found '" + tokens.front() + "'");
        }
        return tokens;
      }
    }
    throw error("unexpected end of file, expected '" + expected_keyword + "'");
  }

  std::vector<std::string> line(const std::string& keyword, std::size_t count) {
    auto tokens = line(keyword);
    if (tokens.size() != count) {
      throw error("'" + keyword + "' line has " + std::to_string(tokens.size()) + " fields, expected " +
                  std::to_string(count));
    }
    return tokens;
  }

  double real(const std::string& token) {
    const auto value = detail::parse_finite(token);
    if (!value) {
      throw error("bad number '" + token + "'");
    }
    return *value;
  }

  std::uint64_t unsigned_integer(const std::string& token) {
    std::uint64_t value = 0;
    std::istringstream in(token);
    if (token.empty() || token.front() == '-' || !(in >> value) || !in.eof()) {
      throw error("bad integer '" + token + "'");
    }
    return value;
  }

  DataError error(const std::string& what) const {
    return DataError(source_ + ": line " + std::to_string(line_number_) + ": " + what);
  }

  bool at_end() {
    std::string text;
    while (std::getline(in_, text)) {
      ++line_number_;
      if (!detail::trim(text).empty()) {
        return false;
      }
    }
    return true;
  }

private:
  std::istream& in_;
  std::string source_;
  std::size_t line_number_ = 0;
};

AdditiveModel read_terms(Reader& reader, LossKind loss, std::size_t dimension) {
  const auto header = reader.line("terms", 2);
  const auto count = reader.unsigned_integer(header[1]);
  if (count == 0) {
    throw reader.error("model has no terms (at least one round is required)");
  }
  AdditiveModel model(loss);
  for (std::uint64_t t = 1; t <= count; ++t) {
    const auto fields = reader.line("term", 7);
    if (reader.unsigned_integer(fields[1]) != t) {
      throw reader.error("terms out of order");
    }
    Term term;
    term.alpha = reader.real(fields[2]);
    term.stump.feature = static_cast<std::size_t>(reader.unsigned_integer(fields[3]));
    term.stump.threshold = reader.real(fields[4]);
    term.stump.left = reader.real(fields[5]);
    term.stump.right = reader.real(fields[6]);
    if (term.stump.feature >= dimension) {
      throw reader.error("stump feature " + std::to_string(term.stump.feature) + " outside dimension " +
                         std::to_string(dimension));
    }
    model.add(term);
  }
  return model;
}

} // namespace

void write_model(const ModelFile& file, std::ostream& out) {
  if (const auto* classifier = std::get_if<ClassifierFile>(&file)) {
    write_header(out, "classify", classifier->model.loss(), classifier->link, classifier->dimension,
                 classifier->provenance);
    write_terms(classifier->model, out);
  } else {
    const auto& density = std::get<DensityFile>(file);
    const auto& model = density.model;
    write_header(out, "cde", LossKind::logistic, model.link, model.dimension, density.provenance);
    const auto& bp = model.breakpoints;
    out << "support " << format_double(bp.support_lo) << ' ' << format_double(bp.support_hi) << '\n';
    out << "breakpoints " << bp.requested << ' ' << bp.size();
    for (const double b : bp.values) {
      out << ' ' << format_double(b);
    }
    out << '\n';
    for (std::size_t j = 0; j < model.classifiers.size(); ++j) {
      out << "classifier " << (j + 1) << ' ' << format_double(bp.values[j]) << " constant "
          << (model.constant[j] ? 1 : 0) << '\n';
      write_terms(model.classifiers[j], out);
    }
  }
  out << "end\n";
}

ModelFile read_model(std::istream& in, const std::string& source) {
  Reader reader(in, source);
  reader.line(kMagic, 1);
  const auto version = reader.line("format_version", 2);
  if (version[1] != std::to_string(kModelFormatVersion)) {
    throw reader.error("unsupported format_version " + version[1]);
  }
  const std::string mode = reader.line("mode", 2)[1];
  if (mode != "classify" && mode != "cde") {
    throw reader.error("unknown mode '" + mode + "'");
  }
  const std::string loss_text = reader.line("loss", 2)[1];
  std::optional<LossKind> loss;
  if (loss_text == "exponential") {
    loss = LossKind::exponential;
  } else if (loss_text == "logistic") {
    loss = LossKind::logistic;
  } else {
    throw reader.error("unknown loss '" + loss_text + "'");
  }
  const std::string link_text = reader.line("link", 2)[1];
  Link link = Link::sigmoid_2f;
  if (link_text == "sigmoid_f") {
    link = Link::sigmoid_f;
  } else if (link_text != "sigmoid_2f") {
    throw reader.error("unknown link '" + link_text + "'");
  }
  const auto dimension = static_cast<std::size_t>(reader.unsigned_integer(reader.line("dimension", 2)[1]));
  if (dimension == 0) {
    throw reader.error("dimension must be positive");
  }
  Provenance provenance;
  provenance.seed = reader.unsigned_integer(reader.line("seed", 2)[1]);
  const auto config = reader.line("config");
  for (std::size_t k = 1; k < config.size(); ++k) {
    const auto eq = config[k].find('=');
    if (eq == std::string::npos) {
      throw reader.error("config entry '" + config[k] + "' is not key=value");
    }
    const auto value = decode_value(config[k].substr(eq + 1));
    if (!value) {
      throw reader.error("bad escape in config entry '" + config[k] + "'");
    }
    provenance.config.emplace_back(config[k].substr(0, eq), *value);
  }

  ModelFile file;
  if (mode == "classify") {
    ClassifierFile classifier{read_terms(reader, *loss, dimension), link, dimension, std::move(provenance)};
    file = std::move(classifier);
  } else {
    if (*loss != LossKind::logistic) {
      throw reader.error("conditional density models use logistic loss");
    }
    DensityFile density;
    density.provenance = std::move(provenance);
    auto& model = density.model;
    model.link = link;
    model.dimension = dimension;
    const auto support = reader.line("support", 3);
    model.breakpoints.support_lo = reader.real(support[1]);
    model.breakpoints.support_hi = reader.real(support[2]);
    const auto bp = reader.line("breakpoints");
    if (bp.size() < 3) {
      throw reader.error("breakpoints line too short");
    }
    model.breakpoints.requested = static_cast<std::size_t>(reader.unsigned_integer(bp[1]));
    const auto k = static_cast<std::size_t>(reader.unsigned_integer(bp[2]));
    if (k == 0 || bp.size() != k + 3) {
      throw reader.error("breakpoints line does not list k values");
    }
    for (std::size_t j = 0; j < k; ++j) {
      const double b = reader.real(bp[j + 3]);
      if (!model.breakpoints.values.empty() && !(b > model.breakpoints.values.back())) {
        throw reader.error("breakpoints must be strictly increasing");
      }
      model.breakpoints.values.push_back(b);
    }
    if (!(model.breakpoints.support_lo <= model.breakpoints.values.front() &&
          model.breakpoints.values.back() <= model.breakpoints.support_hi)) {
      throw reader.error("breakpoints outside the support");
    }
    for (std::size_t j = 0; j < k; ++j) {
      const auto header = reader.line("classifier", 5);
      if (reader.unsigned_integer(header[1]) != j + 1 || reader.real(header[2]) != model.breakpoints.values[j] ||
          header[3] != "constant" || (header[4] != "0" && header[4] != "1")) {
        throw reader.error("malformed classifier header");
      }
      model.constant.push_back(header[4] == "1");
      model.classifiers.push_back(read_terms(reader, LossKind::logistic, dimension));
    }
    file = std::move(density);
  }
  reader.line("end", 1);
  if (!reader.at_end()) {
    throw reader.error("trailing content after 'end'");
  }
  return file;
}

ModelFile load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw DataError("cannot open model '" + path.string() + "'");
  }
  return read_model(in, path.string());
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  auto temporary = path;
  temporary += ".tmp";
  {
    std::ofstream out(temporary, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw DataError("cannot write '" + temporary.string() + "'");
    }
    out << content;
    out.flush();
    if (!out) {
      throw DataError("write failed for '" + temporary.string() + "'");
    }
  }
  std::error_code ec;
  std::filesystem::rename(temporary, path, ec);
  if (ec) {
    std::filesystem::remove(temporary, ec);
    throw DataError("cannot move output into place at '" + path.string() + "'");
  }
}

void save_model(const ModelFile& file, const std::filesystem::path& path) {
  std::ostringstream buffer;
  write_model(file, buffer);
  write_file_atomic(path, buffer.str());
}

} // namespace boostkit
