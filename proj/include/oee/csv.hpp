#pragma once

#include "oee/entanglement.hpp"
#include "oee/topology.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace oee::csv {

/// Shortest decimal form that parses back to the same double.
std::string format(double x);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const;
  double number(std::size_t row, const std::string& name) const;
};

void write(std::ostream& os, const Table& table);
Table read(std::istream& is);

/// kx,ky,Sx,Sy,Sz,|S| with raw (unnormalized) vectors when `norms` are present.
Table texture_table(const SpinTexture& texture);
/// x,y,Sx,Sy,Sz
Table realspace_texture_table(const RealSpaceTexture& texture);
/// ky,band_index,energy
Table spectrum_table(const SpectrumSeries& series);
/// ky,index,xi,degeneracy,edge_tag
Table entanglement_table(const SpectrumSeries& series);
/// layer,probability
Table localization_table(const LocalizationProfile& profile);
/// mu,delta0,chern,skyrmion,min_spin_norm,status
Table phase_diagram_table(const PhaseDiagram& diagram);

/// Inverse of entanglement_table (and of spectrum_table with `tagged` false).
SpectrumSeries read_spectrum(const Table& table);

}  // namespace oee::csv
