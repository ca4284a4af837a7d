#include <pybind11/pybind11.h>
PYBIND11_MODULE(hestondg, m) { m.doc() = "placeholder"; }
