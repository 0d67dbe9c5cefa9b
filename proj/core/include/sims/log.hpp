#pragma once

#include <functional>
#include <string>

namespace sims {

using WarningSink = std::function<void(const std::string&)>;

/// Replace the process-wide warning sink. Returns the previous sink.
/// The default sink writes "warning: <msg>" to stderr.
WarningSink set_warning_sink(WarningSink sink);

void warn(const std::string& message);

}  // namespace sims
