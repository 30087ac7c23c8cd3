#include "bsmimo/io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <system_error>

namespace bsmimo
{
namespace
{
constexpr std::array<std::string_view, 6> kPatternColumns{"theta", "phi", "re_etheta", "im_etheta", "re_ephi",
                                                          "im_ephi"};
// Angle columns must sit this close to the equiangular layout.
constexpr double kAngleToleranceDeg = 1e-6;

std::string_view trim(std::string_view s)
{
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
    s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line, char sep = ',')
{
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true)
  {
    const auto pos = line.find(sep, start);
    out.push_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos)
      break;
    start = pos + 1;
  }
  return out;
}

std::ifstream open_input(const std::filesystem::path& path)
{
  std::ifstream in(path);
  if (!in)
    throw IoError("cannot open " + path.string());
  return in;
}

std::ofstream open_output(const std::filesystem::path& path)
{
  if (path.has_parent_path())
  {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw IoError("cannot write " + path.string());
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path)
{
  out.flush();
  if (!out)
    throw IoError("write failed for " + path.string());
}

std::string complex_label(Complex r)
{
  return format_ratio(r);
}

} // namespace

std::string format_double(double value)
{
  if (std::isnan(value))
    return "nan";
  if (std::isinf(value))
    return value > 0 ? "inf" : "-inf";
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), res.ptr);
}

double parse_double(std::string_view text)
{
  text = trim(text);
  if (text == "inf" || text == "+inf")
    return std::numeric_limits<double>::infinity();
  if (text == "-inf")
    return -std::numeric_limits<double>::infinity();
  if (text == "nan")
    return std::numeric_limits<double>::quiet_NaN();
  if (!text.empty() && text.front() == '+')
    text.remove_prefix(1);
  double value = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size())
    throw ParseError("not a number: '" + std::string(text) + "'");
  return value;
}

PatternFile read_pattern_csv(const std::filesystem::path& path)
{
  auto in = open_input(path);
  const std::string where = path.string();

  PatternFileHeader header;
  std::optional<std::pair<Index, Index>> declared_shape;
  std::array<int, 6> column{-1, -1, -1, -1, -1, -1};
  std::size_t n_columns = 0;
  bool have_header = false;

  struct Row
  {
    std::size_t line;
    std::array<double, 6> v;
  };
  std::vector<Row> rows;

  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw))
  {
    ++line_no;
    const std::string_view line = trim(raw);
    if (line.empty())
      continue;
    if (line.front() == '#')
    {
      const auto body = trim(line.substr(1));
      const auto colon = body.find(':');
      if (colon == std::string_view::npos)
        continue;
      const auto key = trim(body.substr(0, colon));
      const auto value = trim(body.substr(colon + 1));
      if (key == "frequency")
        header.frequency = std::string(value);
      else if (key == "state")
        header.state = std::string(value);
      else if (key == "grid")
      {
        const auto x = value.find('x');
        try
        {
          declared_shape = {static_cast<Index>(parse_double(value.substr(0, x))),
                            static_cast<Index>(parse_double(value.substr(x + 1)))};
        }
        catch (const ParseError&)
        {
          throw ParseError(where, line_no, "malformed grid declaration '" + std::string(value) + "'");
        }
      }
      continue;
    }

    const auto fields = split(line);
    if (!have_header)
    {
      have_header = true;
      n_columns = fields.size();
      for (std::size_t i = 0; i < fields.size(); ++i)
      {
        const auto name = fields[i];
        if (name == "theta_deg" || name == "theta_rad")
        {
          column[0] = int(i);
          header.units = name == "theta_rad" ? AngleUnit::rad : AngleUnit::deg;
        }
        else if (name == "phi_deg" || name == "phi_rad")
          column[1] = int(i);
        else
          for (std::size_t c = 2; c < kPatternColumns.size(); ++c)
            if (name == kPatternColumns[c])
              column[c] = int(i);
      }
      for (std::size_t c = 0; c < kPatternColumns.size(); ++c)
        if (column[c] < 0)
        {
          const std::string name = c < 2 ? std::string(kPatternColumns[c]) + "_deg" : std::string(kPatternColumns[c]);
          throw ParseError(where, line_no, "missing column '" + name + "'");
        }
      continue;
    }

    if (fields.size() != n_columns)
      throw ParseError(where, line_no,
                       "expected " + std::to_string(n_columns) + " fields, found " + std::to_string(fields.size()));
    Row row{line_no, {}};
    for (std::size_t c = 0; c < kPatternColumns.size(); ++c)
    {
      try
      {
        row.v[c] = parse_double(fields[column[c]]);
      }
      catch (const ParseError&)
      {
        throw ParseError(where, line_no, "bad value '" + std::string(fields[column[c]]) + "' in column " +
                                             std::string(kPatternColumns[c]));
      }
      if (!std::isfinite(row.v[c]))
        throw ParseError(where, line_no, "non-finite value in column " + std::string(kPatternColumns[c]));
    }
    if (header.units == AngleUnit::rad)
    {
      row.v[0] = rad_to_deg(row.v[0]);
      row.v[1] = rad_to_deg(row.v[1]);
    }
    rows.push_back(row);
  }

  if (!have_header)
    throw ParseError(where, line_no, "missing header row");
  if (rows.empty())
    throw ParseError(where, line_no, "no data rows");

  // phi count = run length of the first theta row.
  std::size_t n_phi = 1;
  while (n_phi < rows.size() && rows[n_phi].v[0] == rows[0].v[0])
    ++n_phi;
  if (rows.size() % n_phi != 0)
    throw ParseError(where, rows.back().line, "row count is not a multiple of the phi count " + std::to_string(n_phi));
  const std::size_t n_theta = rows.size() / n_phi;
  if (declared_shape && (declared_shape->first != Index(n_theta) || declared_shape->second != Index(n_phi)))
    throw ParseError(where, rows.back().line, "declared grid does not match the data rows");
  if (n_theta < 3 || n_phi < 4)
    throw ParseError(where, rows.back().line, "grid is too small (" + std::to_string(n_theta) + " x " +
                                                  std::to_string(n_phi) + ")");

  for (std::size_t r = 0; r < rows.size(); ++r)
  {
    const double theta = 180.0 * double(r / n_phi) / double(n_theta - 1);
    const double phi = 360.0 * double(r % n_phi) / double(n_phi);
    if (std::abs(rows[r].v[0] - theta) > kAngleToleranceDeg || std::abs(rows[r].v[1] - phi) > kAngleToleranceDeg)
      throw ParseError(where, rows[r].line,
                       "irregular grid: expected (" + format_double(theta) + ", " + format_double(phi) + ") deg");
  }

  auto grid = build_grid<double>(Index(n_theta), Index(n_phi));
  Pattern::Field field(grid->size(), 2);
  for (std::size_t r = 0; r < rows.size(); ++r)
  {
    field(Index(r), 0) = Complex(rows[r].v[2], rows[r].v[3]);
    field(Index(r), 1) = Complex(rows[r].v[4], rows[r].v[5]);
  }
  header.n_theta = Index(n_theta);
  header.n_phi = Index(n_phi);
  return {header, Pattern(std::move(grid), std::move(field))};
}

Pattern load_pattern_csv(const std::filesystem::path& path)
{
  return read_pattern_csv(path).pattern;
}

void save_pattern_csv(const std::filesystem::path& path, const Pattern& pattern, const std::string& state,
                      const std::string& frequency)
{
  auto out = open_output(path);
  const auto& grid = *pattern.grid();
  if (!frequency.empty())
    out << "# frequency: " << frequency << '\n';
  if (!state.empty())
    out << "# state: " << state << '\n';
  out << "# grid: " << grid.n_theta() << " x " << grid.n_phi() << '\n';
  out << "theta_deg,phi_deg,re_etheta,im_etheta,re_ephi,im_ephi\n";
  for (Index p = 0; p < grid.size(); ++p)
  {
    const auto s = pattern.at(p);
    out << format_double(rad_to_deg(grid.theta_at(p))) << ',' << format_double(rad_to_deg(grid.phi_at(p))) << ','
        << format_double(s[0].real()) << ',' << format_double(s[0].imag()) << ',' << format_double(s[1].real())
        << ',' << format_double(s[1].imag()) << '\n';
  }
  finish(out, path);
}

void write_evm_map_csv(const std::filesystem::path& path, const EvmMap<double>& map)
{
  auto out = open_output(path);
  const auto& grid = *map.evm.grid();
  out << "theta_deg,phi_deg,evm_linear,evm_db,masked\n";
  for (Index p = 0; p < grid.size(); ++p)
  {
    const double e = map.evm[p];
    out << format_double(rad_to_deg(grid.theta_at(p))) << ',' << format_double(rad_to_deg(grid.phi_at(p))) << ','
        << format_double(e) << ',' << format_double(linear_to_db20(e)) << ',' << (map.masked[p] ? 1 : 0) << '\n';
  }
  finish(out, path);
}

void write_cdf_csv(const std::filesystem::path& path, const std::vector<double>& sorted_errors)
{
  auto out = open_output(path);
  out << "error,cumulative_probability\n";
  const auto prob = cdf_probabilities(sorted_errors.size());
  for (std::size_t i = 0; i < sorted_errors.size(); ++i)
    out << format_double(sorted_errors[i]) << ',' << format_double(prob[i]) << '\n';
  finish(out, path);
}

std::vector<double> read_cdf_csv(const std::filesystem::path& path)
{
  auto in = open_input(path);
  const std::string where = path.string();
  std::string raw;
  std::size_t line_no = 0;
  std::vector<double> values;
  bool have_header = false;
  while (std::getline(in, raw))
  {
    ++line_no;
    const auto line = trim(raw);
    if (line.empty() || line.front() == '#')
      continue;
    const auto fields = split(line);
    if (!have_header)
    {
      if (fields.size() != 2 || fields[0] != "error" || fields[1] != "cumulative_probability")
        throw ParseError(where, line_no, "expected header 'error,cumulative_probability'");
      have_header = true;
      continue;
    }
    if (fields.size() != 2)
      throw ParseError(where, line_no, "expected 2 fields");
    try
    {
      const double v = parse_double(fields[0]);
      const double p = parse_double(fields[1]);
      if (!values.empty() && v < values.back())
        throw ParseError(where, line_no, "errors are not sorted");
      if (!(p > 0 && p <= 1))
        throw ParseError(where, line_no, "cumulative probability outside (0, 1]");
      values.push_back(v);
    }
    catch (const ParseError& e)
    {
      if (e.line() != 0)
        throw;
      throw ParseError(where, line_no, e.what());
    }
  }
  if (!have_header)
    throw ParseError(where, line_no, "missing header row");
  return values;
}

void write_constellation_csv(const std::filesystem::path& path,
                             const std::vector<std::pair<std::string, std::vector<ConstellationPoint>>>& sides)
{
  auto out = open_output(path);
  out << "side,ratio,x1_re,x1_im,x2_re,x2_im,x1_hat_re,x1_hat_im,x2_hat_re,x2_hat_im\n";
  for (const auto& [side, points] : sides)
    for (const auto& p : points)
      out << side << ',' << complex_label(p.ratio) << ',' << format_double(p.x1.real()) << ','
          << format_double(p.x1.imag()) << ',' << format_double(p.x2.real()) << ',' << format_double(p.x2.imag())
          << ',' << format_double(p.x1_hat.real()) << ',' << format_double(p.x1_hat.imag()) << ','
          << format_double(p.x2_hat.real()) << ',' << format_double(p.x2_hat.imag()) << '\n';
  finish(out, path);
}

nlohmann::json json_number(double value)
{
  if (std::isfinite(value))
    return value;
  return format_double(value);
}

double json_to_double(const nlohmann::json& value)
{
  if (value.is_number())
    return value.get<double>();
  if (value.is_string())
    return parse_double(value.get<std::string>());
  throw ParseError("expected a number, found " + value.dump());
}

void write_json(const std::filesystem::path& path, const nlohmann::json& doc)
{
  auto out = open_output(path);
  out << doc.dump(2) << '\n';
  finish(out, path);
}

std::vector<std::filesystem::path> save_results(const ResultBundle& results, const std::filesystem::path& out_dir)
{
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec)
    throw IoError("cannot create output directory " + out_dir.string() + ": " + ec.message());

  std::vector<std::filesystem::path> written;
  if (results.metrics)
  {
    written.push_back(out_dir / "metrics.json");
    write_json(written.back(), *results.metrics);
  }
  if (results.evm)
  {
    written.push_back(out_dir / "evm_map.csv");
    write_evm_map_csv(written.back(), *results.evm);
  }
  if (results.monte_carlo)
  {
    for (int s = 0; s < 2; ++s)
    {
      written.push_back(out_dir / ("cdf_stream" + std::to_string(s + 1) + ".csv"));
      write_cdf_csv(written.back(), results.monte_carlo->errors[s]);
    }
  }
  return written;
}

} // namespace bsmimo
