#ifndef PFLOW_WARNINGS_HPP
#define PFLOW_WARNINGS_HPP

#include <functional>
#include <string>

namespace pflow {

using WarningHandler = std::function<void(const std::string&)>;

/// Report a non-fatal condition.  The default handler writes to stderr.
void warn(const std::string& message);

/// Install a handler; returns the previous one.  An empty handler restores the default.
WarningHandler set_warning_handler(WarningHandler handler);

}  // namespace pflow

#endif  // PFLOW_WARNINGS_HPP
