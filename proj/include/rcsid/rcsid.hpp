#pragma once

#include "rcsid/error.hpp"
#include "rcsid/version.hpp"
#include "rcsid/signature.hpp"
#include "rcsid/mie.hpp"
#include "rcsid/random.hpp"
#include "rcsid/special.hpp"
#include "rcsid/distributions.hpp"
#include "rcsid/optimize.hpp"
#include "rcsid/fitting.hpp"
#include "rcsid/fft.hpp"
#include "rcsid/dsp.hpp"
#include "rcsid/recognition.hpp"
#include "rcsid/monte_carlo.hpp"
#include "rcsid/io/csv.hpp"
#include "rcsid/io/json.hpp"
#include "rcsid/io/config.hpp"
#include "rcsid/io/manifest.hpp"
#include "rcsid/io/svg.hpp"
