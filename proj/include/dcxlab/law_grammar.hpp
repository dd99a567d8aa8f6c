#pragma once

// Text grammar for laws and generators used in config files and on the
// command line. Names are case-insensitive; parameters are decimal literals.
//
//   law        := poi(l) | bin(n,p) | hgeo(n,m,k) | nbin(r,p) | geo(p)
//               | mixgeo([w..],[p..]) | dirac(n) | emp([p0,p1,..])
//               | conv(law, law, ...)
//   generator  := poisson(intensity)
//               | lattice(law [,spacing=s] [,dim=d] [,shift=0|1] [,translation=T])
//               | cluster(parent_intensity, law [,translation=T])
//   T          := cell | cell(side) | ball(radius) | gauss(sigma [,truncation])
//
// `cell` without a side uses the lattice spacing; gauss truncation defaults
// to 6 sigma.

#include <string_view>

#include "dcxlab/generators.hpp"
#include "dcxlab/kernels.hpp"

namespace dcx {

DiscreteLaw parse_law(std::string_view text);
GeneratorSpec parse_generator(std::string_view text);
TranslationSpec parse_translation(std::string_view text);

}  // namespace dcx
