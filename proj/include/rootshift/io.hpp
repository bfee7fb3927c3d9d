#ifndef ROOTSHIFT_IO_HPP
#define ROOTSHIFT_IO_HPP

#include <json.hpp>
#include <optional>
#include <ostream>
#include <string>

#include "rootshift/bound.hpp"
#include "rootshift/homotopy.hpp"
#include "rootshift/ideal.hpp"
#include "rootshift/multipoly.hpp"
#include "rootshift/rootfind.hpp"
#include "rootshift/splitter.hpp"

namespace rootshift {

/// Malformed input file or schema violation; the message names the field.
class ParseError : public std::runtime_error {
public:
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

/// One problem instance as described by an input file: the system plus the
/// optional perturbation/deformation/region blocks. Indices from the file
/// (ell, perturbation rows, deformation entries) are remapped to the
/// canonical degree-sorted order on load.
struct SystemFile {
    PolySystem sys;
    std::vector<std::string> variables;
    std::optional<PerturbationSpec> perturbation;
    /// Unscaled deformation direction; the CLI multiplies it by --t.
    std::optional<std::vector<MultiPoly>> deformation;
    std::optional<Box> box;
    std::optional<double> ball_r;

    SystemFile() : sys({MultiPoly::constant(1, 1.0)}) {}  // replaced on parse
};

SystemFile parse_system_file(const std::string& path);
SystemFile parse_system_json(const nlohmann::json& j);

nlohmann::json to_json(const MultiPoly& p);
MultiPoly poly_from_json(const nlohmann::json& j, int n, const std::string& context);

nlohmann::json to_json(const SystemFile& file);
nlohmann::json to_json(const Box& box);
nlohmann::json to_json(const LatticeReport& report);
nlohmann::json to_json(const IdealCertificate& cert);
nlohmann::json to_json(const BoundReport& report);
nlohmann::json to_json(const Root& root);
nlohmann::json to_json(const RootSet& roots);
nlohmann::json to_json(const TrackReport& report);
nlohmann::json to_json(const InvarianceReport& report);
nlohmann::json to_json(const SplitReport& report);
nlohmann::json to_json(const ProbeResult& probe);
nlohmann::json to_json(const KovReport& report);

void write_roots_csv(std::ostream& os, const RootSet& roots);
void write_paths_csv(std::ostream& os, const std::vector<TrackReport>& reports);

}  // namespace rootshift

#endif
