#ifndef HWLAB_IO_HPP
#define HWLAB_IO_HPP

#include "hwlab/dynamics.hpp"
#include "hwlab/grid.hpp"
#include "hwlab/stability.hpp"

#include <filesystem>
#include <optional>
#include <string>

namespace hwlab::io {

// locale-free shortest-17-significant-digit formatting, '.' decimal point
std::string format_double(double v);

// Snapshot file: magic "HWSFLD01", u32 little-endian header length, UTF-8
// JSON header {nx, ny, lx, y_domain, ly, t, p, sign}, then nx*ny complex
// samples as little-endian f64 (re, im) pairs, x-major.
void write_snapshot(const std::filesystem::path& path, const Field& f, double t,
                    const EquationParams& params);

struct Snapshot {
  Field field;
  double t = 0.0;
  double p = 2.0;
  std::string sign;
};

Snapshot read_snapshot(const std::filesystem::path& path);

// header: t,mass,energy,l2hs,h1l2,linf,N plus an orbit_dist column when a
// distance series rides along
void write_ledger_csv(const std::filesystem::path& path, const ConservedLedger& ledger,
                      const std::vector<StabilitySample>* orbit = nullptr);

} // namespace hwlab::io

#endif
