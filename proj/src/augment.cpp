#include "augsel/augment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "augsel/textio.hpp"

namespace augsel {

int TransformSpec::grid_size() const {
  switch (kind) {
    case Kind::translate:
      return 4;
    case Kind::rotate:
      return static_cast<int>(angles.size());
    case Kind::crop:
      return static_cast<int>(borders.size());
  }
  return 0;
}

std::string TransformSpec::describe() const {
  switch (kind) {
    case Kind::translate:
      return "translate(" + std::to_string(offset_px) + "px)";
    case Kind::rotate:
      return "rotate(" + std::to_string(angles.size()) + " angles)";
    case Kind::crop:
      return "crop(" + std::to_string(borders.size()) + " borders)";
  }
  return "?";
}

TransformSpec TransformSpec::make_translate(int offset_px) {
  require(offset_px >= 1, ErrorKind::invalid_argument, "translate offset must be at least 1");
  TransformSpec s;
  s.kind = Kind::translate;
  s.offset_px = offset_px;
  return s;
}

TransformSpec TransformSpec::make_rotate(std::vector<double> angles) {
  require(!angles.empty(), ErrorKind::invalid_argument, "rotation grid must be nonempty");
  std::sort(angles.begin(), angles.end());
  for (double a : angles)
    require(a != 0.0 && std::isfinite(a), ErrorKind::invalid_argument,
            "rotation angles must be finite and nonzero (identity excluded)");
  TransformSpec s;
  s.kind = Kind::rotate;
  s.angles = std::move(angles);
  return s;
}

TransformSpec TransformSpec::evenly_spaced_rotations(double max_degrees, int count) {
  require(max_degrees > 0.0, ErrorKind::invalid_argument, "max_degrees must be positive");
  require(count >= 2, ErrorKind::invalid_argument, "need at least 2 grid angles");
  std::vector<double> angles;
  const double step = 2.0 * max_degrees / (count - 1);
  for (int i = 0; i < count; ++i) {
    double a = -max_degrees + i * step;
    if (std::abs(a) < 1e-12) continue;  // drop identity
    angles.push_back(a);
  }
  return make_rotate(std::move(angles));
}

TransformSpec TransformSpec::make_crop(std::vector<int> borders) {
  require(!borders.empty(), ErrorKind::invalid_argument, "crop grid must be nonempty");
  std::sort(borders.begin(), borders.end());
  for (int b : borders)
    require(b >= 1, ErrorKind::invalid_argument, "crop borders must be at least 1");
  TransformSpec s;
  s.kind = Kind::crop;
  s.borders = std::move(borders);
  return s;
}

namespace {

std::vector<RawImage> apply_grid(const TransformSpec& spec, const RawImage& img) {
  std::vector<RawImage> out;
  switch (spec.kind) {
    case TransformSpec::Kind::translate: {
      const int p = spec.offset_px;
      out.push_back(translate(img, 0, -p));  // up
      out.push_back(translate(img, 0, p));   // down
      out.push_back(translate(img, -p, 0));  // left
      out.push_back(translate(img, p, 0));   // right
      break;
    }
    case TransformSpec::Kind::rotate:
      for (double a : spec.angles) out.push_back(rotate(img, a));
      break;
    case TransformSpec::Kind::crop:
      for (int b : spec.borders) out.push_back(crop_zoom(img, b));
      break;
  }
  return out;
}

LabeledExample to_example(const RawImage& img, int label, double weight, int origin_id) {
  LabeledExample ex;
  auto flat = flatten_scaled(img);
  ex.features = Eigen::Map<const Eigen::VectorXd>(flat.data(), static_cast<Eigen::Index>(flat.size()));
  ex.label = label;
  ex.weight = weight;
  ex.origin_id = origin_id;
  return ex;
}

}  // namespace

AugmentationFamily expand(const TransformSpec& spec, const LabeledExample& example,
                          const RawImage& image) {
  AugmentationFamily fam;
  fam.origin_id = example.origin_id;
  fam.images = apply_grid(spec, image);
  fam.members.reserve(fam.images.size());
  for (const RawImage& img : fam.images)
    fam.members.push_back(to_example(img, example.label, example.weight, example.origin_id));
  return fam;
}

Dataset build_poisoned_test(const std::vector<RawImage>& images, const std::vector<int>& labels,
                            const TransformSpec& spec) {
  require(!images.empty(), ErrorKind::size, "test set is empty");
  require(images.size() == labels.size(), ErrorKind::data, "test image/label count mismatch");
  Dataset out;
  for (std::size_t i = 0; i < images.size(); ++i)
    out.push_back(to_example(images[i], labels[i], 1.0, static_cast<int>(i)));
  for (std::size_t i = 0; i < images.size(); ++i)
    for (const RawImage& img : apply_grid(spec, images[i]))
      out.push_back(to_example(img, labels[i], 1.0, static_cast<int>(i)));
  return out;
}

const std::vector<Eigen::VectorXd>& MemberTable::family(int origin_id) const {
  auto it = members.find(origin_id);
  require(it != members.end(), ErrorKind::index,
          "no augmented members for origin " + std::to_string(origin_id));
  return it->second;
}

MemberTable load_member_csv(const std::filesystem::path& path, int expected_dim, int n_origins) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorKind::io, "cannot open: " + path.string());
  MemberTable table;
  table.feature_dim = expected_dim;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    auto fields = split_csv_line(line);
    if (lineno == 1 && !parse_double(fields[0]).has_value()) continue;  // header
    require(static_cast<int>(fields.size()) == expected_dim + 2, ErrorKind::format,
            path.string() + ":" + std::to_string(lineno) + ": expected origin_id, member_index and " +
                std::to_string(expected_dim) + " features");
    auto origin = parse_double(fields[0]);
    auto member = parse_double(fields[1]);
    require(origin && member, ErrorKind::parse,
            path.string() + ":" + std::to_string(lineno) + ": bad index cell");
    int origin_id = static_cast<int>(*origin);
    int member_index = static_cast<int>(*member);
    require(origin_id >= 0 && origin_id < n_origins, ErrorKind::index,
            path.string() + ":" + std::to_string(lineno) + ": origin_id out of range");
    Eigen::VectorXd f(expected_dim);
    for (int j = 0; j < expected_dim; ++j) {
      auto v = parse_double(fields[static_cast<std::size_t>(j) + 2]);
      require(v.has_value() && std::isfinite(*v), ErrorKind::parse,
              path.string() + ":" + std::to_string(lineno) + ": bad feature cell");
      f[j] = *v;
    }
    auto& fam = table.members[origin_id];
    require(member_index == static_cast<int>(fam.size()), ErrorKind::format,
            path.string() + ":" + std::to_string(lineno) + ": member_index must be contiguous per origin");
    fam.push_back(std::move(f));
  }
  require(!table.members.empty(), ErrorKind::format, path.string() + ": no member rows");
  require(static_cast<int>(table.members.size()) == n_origins, ErrorKind::format,
          path.string() + ": every origin needs a member block (" +
              std::to_string(table.members.size()) + " of " + std::to_string(n_origins) + " present)");
  table.member_count = static_cast<int>(table.members.begin()->second.size());
  for (const auto& [id, fam] : table.members)
    require(static_cast<int>(fam.size()) == table.member_count, ErrorKind::format,
            path.string() + ": origin " + std::to_string(id) +
                " has a different member count; the grid must be uniform");
  return table;
}

void save_member_csv(const std::filesystem::path& path,
                     const std::vector<AugmentationFamily>& families) {
  std::ofstream out(path);
  require(static_cast<bool>(out), ErrorKind::io, "cannot open for writing: " + path.string());
  for (const auto& fam : families) {
    for (std::size_t m = 0; m < fam.members.size(); ++m) {
      out << fam.origin_id << ',' << m;
      const auto& f = fam.members[m].features;
      for (Eigen::Index j = 0; j < f.size(); ++j) out << ',' << format_double(f[j]);
      out << '\n';
    }
  }
  require(static_cast<bool>(out), ErrorKind::io, "write failed: " + path.string());
}

}  // namespace augsel
