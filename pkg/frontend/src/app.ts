// Entry point: load the area configuration, then wire the elicitation
// wizard and the forecast explorer into the two tabs.

import { ApiClient } from './api.js';
import { renderExplorer } from './explorer.js';
import { createWizardState, renderWizard } from './wizard.js';

function baseUrl(): string {
  const meta = document.querySelector('meta[name="cfdcast-api"]');
  return meta?.getAttribute('content') ?? '';
}

async function boot(): Promise<void> {
  const api = new ApiClient(baseUrl());
  const wizardRoot = document.getElementById('wizard')!;
  const explorerRoot = document.getElementById('explorer')!;
  const targetSelect = document.getElementById('wizard-target') as HTMLSelectElement;

  const [areas, summary] = await Promise.all([api.getAreas(), api.getPanelSummary()]);
  const targets = areas.filter((a) => !a.observed_cfd);
  for (const area of targets) {
    const option = document.createElement('option');
    option.value = area.code;
    option.textContent = area.code;
    targetSelect.appendChild(option);
  }

  const startWizard = () => {
    const state = createWizardState(targetSelect.value, areas);
    renderWizard(wizardRoot, state, {
      api,
      onSubmitted: () => renderExplorer(explorerRoot, { api, summary, areas }),
    });
  };
  targetSelect.addEventListener('change', startWizard);
  startWizard();

  renderExplorer(explorerRoot, { api, summary, areas });

  for (const button of document.querySelectorAll<HTMLButtonElement>('[data-tab]')) {
    button.addEventListener('click', () => {
      for (const panel of document.querySelectorAll<HTMLElement>('.tab-panel')) {
        panel.hidden = panel.id !== button.dataset.tab;
      }
    });
  }
}

void boot().catch((error) => {
  const banner = document.getElementById('error-banner');
  if (banner) {
    banner.hidden = false;
    banner.textContent = `failed to reach the cfdcast service: ${error}`;
  }
});
