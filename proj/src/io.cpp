#include "hwlab/io.hpp"

#include <json.hpp>

#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>

static_assert(std::endian::native == std::endian::little,
              "snapshot format is little-endian; big-endian hosts need byte swaps");

namespace hwlab::io {

using nlohmann::json;

namespace {

constexpr char kMagic[8] = {'H', 'W', 'S', 'F', 'L', 'D', '0', '1'};

std::string sign_name(Sign s) { return s == Sign::Focusing ? "focusing" : "defocusing"; }

std::string domain_name(YDomain d) {
  return d == YDomain::Torus ? "torus" : "truncated_line";
}

[[noreturn]] void io_fail(const std::filesystem::path& path, const std::string& what) {
  throw std::runtime_error(path.string() + ": " + what);
}

} // namespace

std::string format_double(double v) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

void write_snapshot(const std::filesystem::path& path, const Field& f, double t,
                    const EquationParams& params) {
  const GridSpec& g = f.grid();
  json header = {
      {"nx", g.nx},
      {"ny", g.ny},
      {"lx", g.lx},
      {"y_domain", domain_name(g.y_domain)},
      {"ly", g.ly},
      {"t", t},
      {"p", params.p},
      {"sign", sign_name(params.sign)},
  };
  const std::string head = header.dump();

  std::ofstream out(path, std::ios::binary);
  if (!out) io_fail(path, "cannot open for writing");
  out.write(kMagic, sizeof(kMagic));
  const std::uint32_t len = static_cast<std::uint32_t>(head.size());
  out.write(reinterpret_cast<const char*>(&len), 4);
  out.write(head.data(), static_cast<std::streamsize>(head.size()));
  out.write(reinterpret_cast<const char*>(f.values().data()),
            static_cast<std::streamsize>(g.size() * sizeof(cplx)));
  if (!out) io_fail(path, "write failed");
}

Snapshot read_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) io_fail(path, "cannot open for reading");
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kMagic, 8) != 0) io_fail(path, "bad magic bytes");
  std::uint32_t len = 0;
  in.read(reinterpret_cast<char*>(&len), 4);
  if (!in || len == 0 || len > (1u << 20)) io_fail(path, "bad header length");
  std::string head(len, '\0');
  in.read(head.data(), len);
  if (!in) io_fail(path, "truncated header");

  json h = json::parse(head, nullptr, false);
  if (h.is_discarded()) io_fail(path, "header is not valid JSON");

  const std::string dom = h.at("y_domain").get<std::string>();
  const YDomain yd = dom == "torus" ? YDomain::Torus : YDomain::TruncatedLine;
  GridSpec g = make_grid(h.at("nx").get<int>(), h.at("ny").get<int>(), h.at("lx").get<double>(),
                         yd, h.value("ly", two_pi));

  std::vector<cplx> values(g.size());
  in.read(reinterpret_cast<char*>(values.data()),
          static_cast<std::streamsize>(g.size() * sizeof(cplx)));
  if (!in) io_fail(path, "truncated sample data");

  Snapshot snap{Field::from_physical(g, std::move(values)), h.at("t").get<double>(),
                h.at("p").get<double>(), h.at("sign").get<std::string>()};
  return snap;
}

void write_ledger_csv(const std::filesystem::path& path, const ConservedLedger& ledger,
                      const std::vector<StabilitySample>* orbit) {
  if (orbit && orbit->size() != ledger.rows.size())
    throw std::invalid_argument("write_ledger_csv: orbit series length mismatch");
  std::ofstream out(path);
  if (!out) io_fail(path, "cannot open for writing");
  out << "t,mass,energy,l2hs,h1l2,linf,N";
  if (orbit) out << ",orbit_dist";
  out << "\n";
  for (std::size_t n = 0; n < ledger.rows.size(); ++n) {
    const LedgerRow& r = ledger.rows[n];
    out << format_double(r.t) << ',' << format_double(r.mass) << ',' << format_double(r.energy)
        << ',' << format_double(r.l2hs) << ',' << format_double(r.h1l2) << ','
        << format_double(r.linf) << ',' << format_double(r.blowup_n);
    if (orbit) out << ',' << format_double((*orbit)[n].distance);
    out << "\n";
  }
  if (!out) io_fail(path, "write failed");
}

} // namespace hwlab::io
