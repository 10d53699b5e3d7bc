from flask import Flask, request, jsonify, g
import json
import logging
import signal
import threading
import time
import uuid
from functools import wraps
from werkzeug.exceptions import HTTPException, RequestTimeout

import settings
from assessment_pipeline import AssessmentPipeline, parse_selection
from errors import ConfigurationError, MonteCarloAbort, UndefinedMetricError
from project_io import parse_distribution, project_from_dict, serialize_project
from reports import ReportFormat, render_report
from scenarios import AutomationLevel, PATHWAY_IDS, compare_pathways, list_presets, preset
from distributions import UncertaintySpec
from uncertainty import default_distributions, run_monte_carlo, run_paired_monte_carlo, tornado

# Set up logging
logging.basicConfig(level=settings.LOG_LEVEL, format=settings.LOG_FORMAT)
logger = logging.getLogger(__name__)

app = Flask(__name__)
pipeline = AssessmentPipeline()

# Monte Carlo requests are capped so one call cannot pin a worker for long
MAX_API_SAMPLES = 50_000


class TimeoutError(Exception):
    pass


def timeout_handler(signum, frame):
    raise TimeoutError("Request timed out")


def timeout(seconds):
    def decorator(func):
        @wraps(func)
        def wrapper(*args, **kwargs):
            # SIGALRM can only be installed from the main thread
            if threading.current_thread() is not threading.main_thread():
                return func(*args, **kwargs)
            signal.signal(signal.SIGALRM, timeout_handler)
            signal.alarm(seconds)
            try:
                result = func(*args, **kwargs)
            finally:
                signal.alarm(0)
            return result
        return wrapper
    return decorator


def error_response(code, message):
    return jsonify({
        'status': 'error',
        'code': code,
        'message': message,
        'request_id': g.request_id
    }), code


def success_response(data):
    return jsonify({
        'status': 'success',
        'data': data,
        'request_id': g.request_id
    })


def structured(results):
    return json.loads(render_report(results, ReportFormat.STRUCTURED))


def request_body():
    body = request.get_json(silent=True)
    if not isinstance(body, dict):
        raise ConfigurationError(None, 'request body must be a JSON object')
    return body


def project_from_body(body):
    """A full project document under 'project', or a preset reference under 'preset'."""
    if 'preset' in body:
        reference = body['preset']
        if not isinstance(reference, dict):
            raise ConfigurationError('preset', 'must be an object with pathway and level')
        return preset(reference.get('pathway'), reference.get('level', AutomationLevel.BASELINE.value))
    if 'project' not in body:
        raise ConfigurationError('project', 'missing required field')
    return project_from_dict(body['project'])


@app.before_request
def before_request():
    # Generate a unique request ID
    g.request_id = str(uuid.uuid4())
    g.start_time = time.time()
    logger.info(f"Request started - ID: {g.request_id}")


@app.after_request
def after_request(response):
    duration = time.time() - g.start_time
    logger.info(f"Request completed - ID: {g.request_id} - Duration: {duration:.2f}s")
    return response


@app.errorhandler(RequestTimeout)
@app.errorhandler(TimeoutError)
def handle_timeout(e):
    logger.error(f"Request timed out - ID: {g.request_id}")
    return error_response(504, 'Request timed out. Please try again.')


@app.errorhandler(ConfigurationError)
def handle_configuration_error(e):
    logger.warning(f"Invalid request - ID: {g.request_id}: {e}")
    return error_response(400, str(e))


@app.errorhandler(UndefinedMetricError)
@app.errorhandler(MonteCarloAbort)
def handle_undefined_metric(e):
    logger.warning(f"Metric undefined - ID: {g.request_id}: {e}")
    return error_response(422, str(e))


@app.errorhandler(HTTPException)
def handle_http_error(e):
    return error_response(e.code, e.description)


@app.errorhandler(Exception)
def handle_error(e):
    logger.error(f"Error processing request - ID: {g.request_id}: {str(e)}")
    return error_response(500, str(e))


@app.route('/api/presets', methods=['GET'])
def get_presets():
    return success_response([{'pathway': pathway, 'level': level} for pathway, level in list_presets()])


@app.route('/api/presets/<pathway>/<level>', methods=['GET'])
def get_preset(pathway, level):
    return success_response(serialize_project(preset(pathway, level)))


@app.route('/api/assess', methods=['POST'])
@timeout(settings.REQUEST_TIMEOUT)
def assess():
    config = project_from_body(request_body())
    return success_response(structured(pipeline.assess(config)))


@app.route('/api/compare', methods=['GET'])
@timeout(settings.REQUEST_TIMEOUT)
def compare():
    pathways = parse_selection(request.args.get('presets'), list(PATHWAY_IDS), 'presets')
    levels = parse_selection(request.args.get('levels', 'baseline,full'), [lvl.value for lvl in AutomationLevel],
                             'levels')
    table = compare_pathways([preset(pathway, level) for pathway in pathways for level in levels])
    return success_response(structured(table))


@app.route('/api/montecarlo', methods=['POST'])
@timeout(settings.REQUEST_TIMEOUT)
def montecarlo():
    body = request_body()
    config = project_from_body(body)

    calibration = body.get('calibration')
    if calibration is not None:
        if not isinstance(calibration, dict):
            raise ConfigurationError('calibration', 'must map parameter paths to distributions')
        parameters = {path: parse_distribution(dist, path) for path, dist in calibration.items()}
        spec = UncertaintySpec(parameters, samples=settings.DEFAULT_SAMPLES, seed=settings.DEFAULT_SEED)
    else:
        spec = config.uncertainty or default_distributions(config)

    try:
        samples = int(body.get('samples', spec.samples))
        seed = int(body.get('seed', spec.seed))
    except (TypeError, ValueError):
        raise ConfigurationError('samples', 'samples and seed must be integers')
    if not 1 <= samples <= MAX_API_SAMPLES:
        raise ConfigurationError('samples', f'must be between 1 and {MAX_API_SAMPLES}')
    spec = UncertaintySpec(spec.parameters, samples=samples, seed=seed)

    paired_level = body.get('paired_level')
    if paired_level:
        results = run_paired_monte_carlo(config, spec, level=paired_level)
    else:
        results = run_monte_carlo(config, spec)
    return success_response(structured(results))


@app.route('/api/tornado', methods=['POST'])
@timeout(settings.REQUEST_TIMEOUT)
def sensitivity():
    body = request_body()
    config = project_from_body(body)
    ranges = body.get('ranges')
    if ranges is not None:
        if not isinstance(ranges, dict) or not all(isinstance(b, list) and len(b) == 2 for b in ranges.values()):
            raise ConfigurationError('ranges', 'must map parameter paths to [low, high]')
        ranges = {path: tuple(bounds) for path, bounds in ranges.items()}
    entries = tornado(config, ranges, metric=body.get('metric', 'lcoe'))
    return success_response(structured(entries))


@app.route('/health', methods=['GET'])
def health_check():
    return jsonify({
        'status': 'healthy',
        'request_id': g.request_id
    })


if __name__ == '__main__':
    app.config['TIMEOUT'] = settings.REQUEST_TIMEOUT
    app.run(host='0.0.0.0', port=settings.PORT, threaded=True)
