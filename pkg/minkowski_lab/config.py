from dotenv import load_dotenv
from pydantic_settings import BaseSettings

load_dotenv()


class Settings(BaseSettings):
    app_name: str = "minkowski-lab"
    log_level: str = "INFO"

    boundary_tolerance: float = 1e-9
    probe_offset: float = 1e-6
    extremality_tolerance: float = 1e-9
    circle_refinement: int = 4096
    sphere_refinement: int = 64
    seed_sagitta_cells: float = 1 / 64

    eps_floor_cells: float = 4.0
    eps_max_cells: float = 64.0
    eps_points: int = 4
    exact_eps_max: float = 0.25

    extrapolation_points: int = 4
    rel_tol: float = 0.03
    bracket_tol: float = 0.25
    abs_floor_factor: float = 0.05
    lower_bound_tol: float = 0.03
    exact_tolerance: float = 1e-12

    density_threshold_low: float = 0.05
    density_threshold_high: float = 0.95
    density_radius: float = 0.1
    density_radii_points: int = 5
    density_resolution: int = 128

    max_stencil_offsets: int = 4_000_000
    max_grid_cells: int = 16_777_216
    brute_pair_cap: int = 50_000_000
    default_grid: int = 1024
    dilation_mode: str = "seeded"

    verify_directions: int = 500
    random_seed: int = 20240917


settings = Settings()
