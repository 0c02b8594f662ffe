// Elicitation wizard: one screen per covariate, one slider per traded
// area, a live normalization preview, and a months-of-data input. Raw
// scores are free-scale; the server owns normalization, and after a
// submit the wizard displays the server-echoed shares verbatim.

import { ApiClient, ApiError } from './api.js';
import { formatPercent, normalizeShares } from './normalize.js';
import type { Area, ProfileEcho, ProfilePayload } from './types.js';
import { COVARIATE_LABELS } from './types.js';

export interface WizardState {
  target: string;
  observedOrder: string[];
  areas: Record<string, Area>;
  covariates: string[];
  step: number;
  raw: Record<string, number[]>;
  months: Record<string, number>;
  locked: Record<string, boolean>;
  echo: ProfilePayload | null;
  version: string | null;
  errors: Record<string, string>;
}

export function covariatesFor(target: Area): string[] {
  return target.has_hydro ? ['FW', 'SA', 'SS', 'WA'] : ['FW', 'SA', 'SS'];
}

export function isStructuralZero(cov: string, area: Area): boolean {
  return cov === 'WA' && !area.has_hydro;
}

export function createWizardState(target: string, areas: Area[]): WizardState {
  const byCode: Record<string, Area> = {};
  for (const area of areas) byCode[area.code] = area;
  const targetArea = byCode[target];
  if (!targetArea) throw new Error(`unknown target area ${target}`);
  const observedOrder = areas.filter((a) => a.observed_cfd).map((a) => a.code);
  const covariates = covariatesFor(targetArea);
  const raw: Record<string, number[]> = {};
  const months: Record<string, number> = {};
  const locked: Record<string, boolean> = {};
  for (const cov of covariates) {
    raw[cov] = observedOrder.map((code) => (isStructuralZero(cov, byCode[code]) ? 0 : 10));
    months[cov] = 1;
    locked[cov] = false;
  }
  return {
    target,
    observedOrder,
    areas: byCode,
    covariates,
    step: 0,
    raw,
    months,
    locked,
    echo: null,
    version: null,
    errors: {},
  };
}

/** Live preview of the current row as simplex shares. */
export function rowShares(state: WizardState, cov: string): number[] {
  return normalizeShares(state.raw[cov]);
}

/** Displayed shares: server echo once submitted, local preview before. */
export function displayedShares(state: WizardState, cov: string): number[] {
  if (state.echo) return state.echo.rows[cov].rho;
  return rowShares(state, cov);
}

/** PUT body: raw free-scale scores; the server normalizes and echoes. */
export function profileBody(state: WizardState): Omit<ProfilePayload, 'target'> & { transcript: unknown } {
  const rows: ProfilePayload['rows'] = {};
  const similarity: Record<string, Record<string, number>> = {};
  for (const cov of state.covariates) {
    rows[cov] = { rho: [...state.raw[cov]], months: state.months[cov] };
    similarity[cov] = {};
    state.observedOrder.forEach((code, i) => {
      similarity[cov][code] = state.raw[cov][i];
    });
  }
  return {
    observed_order: [...state.observedOrder],
    rows,
    transcript: {
      target: state.target,
      observed_order: [...state.observedOrder],
      similarity,
      months: { ...state.months },
    },
  };
}

export function similarityPrompt(target: string, cov: string, observed: string): string {
  const label = COVARIATE_LABELS[cov] ?? cov;
  return (
    `If ${target} had a traded CfD, how closely would the effect of ` +
    `${label.toLowerCase()} on it track the effect seen in ${observed}? ` +
    `Scores are free-scale and rescaled to shares.`
  );
}

export function monthsPrompt(cov: string): string {
  return (
    `Confidence in the ${cov} scores: how many months of daily market data ` +
    `would carry the same amount of information as this judgment?`
  );
}

export interface WizardDeps {
  api: ApiClient;
  onSubmitted?: (echo: ProfileEcho) => void;
}

export function renderWizard(root: HTMLElement, state: WizardState, deps: WizardDeps): void {
  const cov = state.covariates[state.step];
  root.innerHTML = '';
  const screen = document.createElement('section');
  screen.className = 'wizard-screen';
  screen.dataset.covariate = cov;

  const title = document.createElement('h2');
  title.textContent = `${state.target}: ${COVARIATE_LABELS[cov] ?? cov} (${cov})`;
  screen.appendChild(title);

  const progress = document.createElement('p');
  progress.className = 'wizard-progress';
  progress.textContent = `Row ${state.step + 1} of ${state.covariates.length}`;
  screen.appendChild(progress);

  const shares = displayedShares(state, cov);
  state.observedOrder.forEach((code, i) => {
    const area = state.areas[code];
    const rowEl = document.createElement('div');
    rowEl.className = 'wizard-row';
    rowEl.dataset.area = code;

    const question = document.createElement('label');
    question.className = 'wizard-question';
    question.textContent = similarityPrompt(state.target, cov, code);
    rowEl.appendChild(question);

    const slider = document.createElement('input');
    slider.type = 'range';
    slider.min = '0';
    slider.max = '100';
    slider.step = '1';
    slider.value = String(state.raw[cov][i]);
    slider.dataset.area = code;
    const zero = isStructuralZero(cov, area);
    slider.disabled = zero || state.locked[cov];
    if (zero) rowEl.classList.add('structural-zero');
    slider.addEventListener('input', () => {
      state.raw[cov][i] = Number(slider.value);
      state.echo = null; // edits invalidate the stored echo display
      state.version = null;
      renderWizard(root, state, deps);
    });
    rowEl.appendChild(slider);

    const share = document.createElement('span');
    share.className = 'wizard-share';
    share.textContent = zero && !state.echo ? '0.0%' : formatPercent(shares[i]);
    rowEl.appendChild(share);

    screen.appendChild(rowEl);
  });

  const monthsRow = document.createElement('div');
  monthsRow.className = 'wizard-months';
  const monthsLabel = document.createElement('label');
  monthsLabel.textContent = monthsPrompt(cov);
  const monthsInput = document.createElement('input');
  monthsInput.type = 'number';
  monthsInput.min = '0.1';
  monthsInput.step = '0.5';
  monthsInput.value = String(state.months[cov]);
  monthsInput.disabled = state.locked[cov];
  monthsInput.addEventListener('input', () => {
    state.months[cov] = Number(monthsInput.value);
    state.echo = null;
    state.version = null;
  });
  monthsRow.append(monthsLabel, monthsInput);
  screen.appendChild(monthsRow);

  const lockRow = document.createElement('div');
  lockRow.className = 'wizard-lock';
  const lock = document.createElement('input');
  lock.type = 'checkbox';
  lock.checked = state.locked[cov];
  lock.addEventListener('change', () => {
    state.locked[cov] = lock.checked;
    renderWizard(root, state, deps);
  });
  const lockLabel = document.createElement('label');
  lockLabel.textContent = 'Lock this row';
  lockRow.append(lock, lockLabel);
  screen.appendChild(lockRow);

  if (state.errors[cov]) {
    const err = document.createElement('p');
    err.className = 'wizard-error';
    err.textContent = state.errors[cov];
    screen.appendChild(err);
  }
  if (state.errors['']) {
    const err = document.createElement('p');
    err.className = 'wizard-error wizard-error-global';
    err.textContent = state.errors[''];
    screen.appendChild(err);
  }

  const nav = document.createElement('div');
  nav.className = 'wizard-nav';
  if (state.step > 0) {
    const back = document.createElement('button');
    back.textContent = 'Back';
    back.addEventListener('click', () => {
      state.step -= 1;
      renderWizard(root, state, deps);
    });
    nav.appendChild(back);
  }
  if (state.step < state.covariates.length - 1) {
    const next = document.createElement('button');
    next.textContent = 'Next';
    next.addEventListener('click', () => {
      state.step += 1;
      renderWizard(root, state, deps);
    });
    nav.appendChild(next);
  } else {
    const submit = document.createElement('button');
    submit.className = 'wizard-submit';
    submit.textContent = 'Submit profile';
    submit.addEventListener('click', async () => {
      state.errors = {};
      try {
        const echo = await deps.api.putProfile(state.target, profileBody(state));
        state.echo = echo.profile;
        state.version = echo.version;
        deps.onSubmitted?.(echo);
      } catch (error) {
        if (error instanceof ApiError) {
          // server messages name the offending row as "row <COV>: ..."
          const match = /row (\w+):/.exec(error.message);
          state.errors[match && state.covariates.includes(match[1]) ? match[1] : ''] =
            error.message;
        } else {
          state.errors[''] = String(error);
        }
      }
      renderWizard(root, state, deps);
    });
    nav.appendChild(submit);
  }
  screen.appendChild(nav);

  if (state.echo) {
    screen.appendChild(renderEcho(state));
  }
  root.appendChild(screen);
}

/** Server-normalized profile, every number taken verbatim from the echo. */
function renderEcho(state: WizardState): HTMLElement {
  const box = document.createElement('div');
  box.className = 'wizard-echo';
  const heading = document.createElement('h3');
  heading.textContent = `Stored profile (version ${state.version ?? '?'})`;
  box.appendChild(heading);
  const table = document.createElement('table');
  const head = document.createElement('tr');
  head.innerHTML =
    '<th></th>' +
    state.observedOrder.map((code) => `<th>${code}</th>`).join('') +
    '<th>months</th>';
  table.appendChild(head);
  for (const cov of state.covariates) {
    const row = state.echo!.rows[cov];
    const tr = document.createElement('tr');
    tr.dataset.covariate = cov;
    tr.innerHTML =
      `<th>${cov}</th>` +
      row.rho.map((v) => `<td class="echo-cell">${String(v)}</td>`).join('') +
      `<td class="echo-months">${String(row.months)}</td>`;
    table.appendChild(tr);
  }
  box.appendChild(table);
  return box;
}
