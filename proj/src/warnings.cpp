#include "pflow/warnings.hpp"

#include <iostream>
#include <mutex>

namespace pflow {

namespace {

std::mutex handler_mutex;
WarningHandler current_handler;

}  // namespace

void warn(const std::string& message)
{
  WarningHandler handler;
  {
    std::lock_guard<std::mutex> lock(handler_mutex);
    handler = current_handler;
  }
  if (handler)
    handler(message);
  else
    std::cerr << "warning: " << message << '\n';
}

WarningHandler set_warning_handler(WarningHandler handler)
{
  std::lock_guard<std::mutex> lock(handler_mutex);
  WarningHandler previous = std::move(current_handler);
  current_handler = std::move(handler);
  return previous;
}

}  // namespace pflow
