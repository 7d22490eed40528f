"""
Subcommand descriptions for the nematic-colloids command line.
"""

MOMENTS_DESC = """Tabulate surface area and normal second moment of catalogue shapes.

Parameters:
shapes - Catalogue names (e.g. 'ball', 'wedge+12', 'assembly1'); default: all
--order - Gauss-Legendre order per patch direction (default: 32)

Example:
nematic-colloids moments wedge+12 assembly1"""

DESIGN_DESC = """Design colloid species whose homogenised potential is (a' - a) tr Q^2 + W tr(QP) + const.

Parameters:
--target - Symmetric P as 6 entries xx,yy,zz,xy,xz,yz or 9 row-major entries
--strength - Coupling W
--a - Bulk coefficient a (default: bulk.a of the configuration)
--a-prime - Target quadratic coefficient a'

Writes design.json, a run configuration reproducing the design.

Example:
nematic-colloids design --target 1,0,0,0,0,0 --strength 0.3 --a 0.5 --a-prime 1"""

FHOM_DESC = """Tabulate the homogenised potential and its gradient over a CSV of Q samples.

Parameters:
input* - CSV with header q1..q5 and optional x,y,z (default: container centre)
--output - Output CSV (default: <output dir>/fhom.csv)

The output adds columns fhom and grad1..grad5."""

MINIMIZE_DESC = """Minimise the homogenised energy F0 on the configured grid.

Writes field.qtf (binary dump), slice.csv (middle z plane) and trace.csv
(energy per iteration) to the output directory."""

SWEEP_DESC = """Run the homogenisation sweep over the configured eps list.

Writes sweep.csv with columns eps, gamma, n_eps, f_eps, f_zero, delta_f,
l2_error, h1_error, constraint_residual, surface, scaled_surface, flat_norm,
iterations, wall_time, status."""

SELFTEST_DESC = """Run the deterministic acceptance checks and print a PASS/FAIL report.

Parameters:
--with-sweep - Also run the homogenisation trend and strong anchoring sweeps (minutes)"""
