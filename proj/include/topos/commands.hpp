#ifndef TOPOS_COMMANDS_HPP
#define TOPOS_COMMANDS_HPP

#include <cstdint>
#include <string>

#include "topos/model.hpp"

namespace topos {

struct CmdOptions {
    bool json = false;
    bool strict = false;
    ModalMode mode = ModalMode::Fast;
    long limit = 4096;
    std::uint64_t seed = 0;
    std::string relation;
    std::string phi;
    std::string formula;
    std::string stage;
    std::string env;  // comma-separated var=element
    std::string sort;
};

// exit statuses: 0 ok, 1 validation failure, 2 strict law failure,
// 3 parse/IO error (the latter two arrive as exceptions)
struct CmdResult {
    int status = 0;
    std::string text;
};

CmdResult cmd_check(const Model& m, const CmdOptions& opt);
CmdResult cmd_histories(const Model& m, const CmdOptions& opt);
CmdResult cmd_axioms(const Model& m, const CmdOptions& opt);
CmdResult cmd_eval(const Model& m, const CmdOptions& opt);
CmdResult cmd_barcan(const Model& m, const CmdOptions& opt);
CmdResult cmd_power(const Model& m, const CmdOptions& opt);
CmdResult cmd_omega(const Model& m, const CmdOptions& opt);

int exit_code_for(ErrorKind kind);

}  // namespace topos

#endif
