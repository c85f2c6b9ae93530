#pragma once

#include <string>
#include <vector>

#include "fracheat/grid.hpp"

namespace fracheat {

struct ExtensionField; // extension.hpp

// Atomic text write: temp file in the target directory, then rename.
void write_text_atomic(const std::string& path, const std::string& content);

// Field CSV: "# grid n Nx Nt L T" header, then rows ix[,iy],it,re,im.
// Extra comment lines ("# ...") may follow the header (provenance echo);
// readers skip them.  All values use 17 significant digits, so finite
// fields round-trip bit-faithfully.
void write_field_csv(const std::string& path, const Field& f,
                     const std::vector<std::string>& comments = {});
Field read_field_csv(const std::string& path);

// ExtensionField CSV: "# extgrid n Nx Nt J" header plus "# base L T Ymax"
// and "# ynodes ..." metadata lines, then rows ix[,iy],j,it,value.
void write_extension_csv(const std::string& path, const ExtensionField& u,
                         const std::vector<std::string>& comments = {});

// Single-height slice as a core Field (y row j).
Field extension_slice(const ExtensionField& u, int j);

std::string format_double(double v); // %.17g

} // namespace fracheat
